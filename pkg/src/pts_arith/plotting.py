"""One figure per experiment report, written to a PNG file."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _classical(report, ax):
    rows = report["results"]["exhaustive"]
    ks = sorted({r["atoms"] for r in rows})
    width = 0.8 / max(len(ks), 1)
    for n, k in enumerate(ks):
        sub = [r for r in rows if r["atoms"] == k]
        xs = [r["depth"] + n * width for r in sub]
        ax.bar(xs, [r["formulas"] for r in sub], width, label=f"{k} atoms: all")
        ax.bar(xs, [r["valid"] for r in sub], width, color="black", alpha=0.35)
    ax.set_yscale("log")
    ax.set_xlabel("formula depth")
    ax.set_ylabel("formulas (dark: valid)")
    ax.legend(fontsize=8)


def _persistence(report, ax):
    res = report["results"]
    names = ["bases", "base_pairs", "family_pairs", "support_values", "violations"]
    vals = [res[n] for n in names]
    ax.bar(names, [max(v, 0.5) for v in vals])
    ax.set_yscale("log")
    ax.set_ylabel("count")
    ax.tick_params(axis="x", labelsize=8)
    ax.set_xlabel(f"over {res['formulas']} formulas")


def _maxi(report, ax):
    rows = report["results"]["vocabularies"]
    labels = [f"{r['vocabulary'][:4]} {r['atoms']}" for r in rows]
    xs = range(len(rows))
    ax.bar([x - 0.2 for x in xs], [r["classes"] for r in rows], 0.4, label="maxiconsistent classes")
    ax.bar([x + 0.2 for x in xs], [r["proper_subsets"] for r in rows], 0.4, label="proper atom subsets")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels, fontsize=8)
    ax.set_ylabel("count")
    ax.legend(fontsize=8)


def _local(report, ax):
    lengths = report["results"]["proof_lengths"]
    if lengths:
        ax.hist(lengths, bins=range(1, max(lengths) + 2), align="left")
    ax.set_xlabel("proof length")
    ax.set_ylabel("(hypotheses, conclusion) pairs")


def _prf(report, ax):
    rows = report["results"]["proofs"]
    colors = ["tab:green" if r["agree"] else "tab:red" for r in rows]
    ax.barh([r["proof"] for r in rows], [r["lines"] for r in rows], color=colors)
    ax.set_xlabel("lines (green: checker and Prf agree on every prefix)")
    ax.tick_params(axis="y", labelsize=8)


def _numeral(report, ax):
    lengths = report["results"]["proof_lengths"]
    im = ax.imshow(lengths, origin="lower", cmap="viridis")
    ax.set_xlabel("n")
    ax.set_ylabel("m")
    plt.colorbar(im, ax=ax, label="proof length")


_DRAW = {
    "classical-agreement": _classical,
    "persistence": _persistence,
    "maxiconsistent": _maxi,
    "local-soundness": _local,
    "prf-crosscheck": _prf,
    "numeral-decision": _numeral,
}


def render(report: dict, path) -> None:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    _DRAW[report["experiment"]](report, ax)
    status = "pass" if report["passed"] else "FAIL"
    ax.set_title(f"{report['experiment']} ({status})")
    fig.tight_layout()
    # fixed metadata keeps the file byte-identical across runs
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)
