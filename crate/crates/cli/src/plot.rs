//! Generic matplotlib scripts for the data files written by `srspd`.

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PlotKind {
    /// Scatter of a 2-d design file, colored by slice.
    Design,
    /// Mean prediction error against run count.
    Emulation,
    /// Mean best-so-far value against run count.
    Optimization,
}

const DESIGN: &str = r#"import sys
import matplotlib.pyplot as plt

rows, p = [], None
with open(sys.argv[1]) as f:
    for line in f:
        fields = line.rstrip("\n").split("\t")
        if fields[0] == "p":
            p = int(fields[1])
        elif fields[0].isdigit() and p is not None:
            rows.append((int(fields[0]), [float(v) for v in fields[1 + p:]]))
for s in sorted({r[0] for r in rows}):
    xs = [r[1] for r in rows if r[0] == s]
    plt.scatter([x[0] for x in xs], [x[1] for x in xs], label=f"slice {s}", s=18)
plt.gca().set_aspect("equal")
plt.xlim(0, 1)
plt.ylim(0, 1)
plt.legend()
plt.savefig(sys.argv[2] if len(sys.argv) > 2 else "design.png", dpi=150)
"#;

const CURVES: &str = r#"import sys
from collections import defaultdict
import matplotlib.pyplot as plt

acc = defaultdict(list)
with open(sys.argv[1]) as f:
    next(f)
    for line in f:
        objective, strategy, rep, run_index, value = line.rstrip("\n").split("\t")
        acc[(objective, strategy, int(run_index))].append(float(value))
for objective in sorted({k[0] for k in acc}):
    plt.figure()
    for strategy in sorted({k[1] for k in acc if k[0] == objective}):
        keys = sorted(k for k in acc if k[0] == objective and k[1] == strategy)
        plt.plot([k[2] for k in keys], [sum(acc[k]) / len(acc[k]) for k in keys], marker="o", label=strategy)
    plt.title(objective)
    plt.xlabel("runs")
    plt.ylabel(YLABEL)
    plt.legend()
    plt.savefig(f"{objective}.png", dpi=150)
"#;

pub fn script(kind: PlotKind) -> String {
    match kind {
        PlotKind::Design => DESIGN.to_string(),
        PlotKind::Emulation => format!("YLABEL = \"mean prediction error\"\n{CURVES}"),
        PlotKind::Optimization => format!("YLABEL = \"mean best value\"\n{CURVES}"),
    }
}
