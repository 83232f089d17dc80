"""PNG renderings of the CSV tables.  matplotlib is an optional extra and is
imported only when a figure is requested."""
import os


def _pyplot():
    try:
        import matplotlib
    except ImportError as exc:
        raise OSError("figures need matplotlib (pip install cutproject[figures])") from exc
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def _save(fig, path):
    # fixed metadata keeps repeated runs byte-identical
    fig.savefig(path, dpi=110, metadata={"Software": None})


def points_figure(pattern, path):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 6 if pattern.scheme.d > 1 else 1.6))
    pts = pattern.physical
    labels = pattern.labels()
    names = sorted({x or "" for x in labels})
    for name in names:
        idx = [i for i, x in enumerate(labels) if (x or "") == name]
        ys = pts[idx, 1] if pattern.scheme.d > 1 else [0.0] * len(idx)
        ax.scatter(pts[idx, 0], ys, s=2, label=name or None)
    if len(names) > 1:
        ax.legend(markerscale=4, fontsize=7)
    ax.set_aspect("equal" if pattern.scheme.d > 1 else "auto")
    ax.set_title("%d points, box %s" % (len(pattern), pattern.L))
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)


def empirics_figures(comp, rep, cut_rows, out_dir):
    plt = _pyplot()
    panels = [("complexity", [float(r["r"]) for r in comp["rows"]],
               [r["ratio"] for r in comp["rows"]], "p_hat / r^%d" % comp["alpha"])]
    rows = [r for r in rep["rows"] if not r["insufficient_box"]]
    if rows:
        panels.append(("repetitivity", [float(r["r"]) for r in rows],
                       [r["ratio"] for r in rows], "rho_hat / r"))
    if cut_rows:
        panels.append(("cutregions", [float(c["r"]) for c in cut_rows],
                       [c["product"] for c in cut_rows], "min volume * r^d"))
    for name, xs, ys, ylabel in panels:
        fig, ax = plt.subplots(figsize=(5, 3.5))
        ax.loglog(xs, ys, "o-")
        ax.set_xlabel("r")
        ax.set_ylabel(ylabel)
        fig.tight_layout()
        _save(fig, os.path.join(out_dir, name + ".png"))
        plt.close(fig)


def diophantine_figure(results, path):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    for name, res in sorted(results.items()):
        for i, run in enumerate(res["runs"]):
            est = run["estimate"]
            vals = est.min_values()
            pts = [(float(R), v) for R, v in zip(est.schedule, vals) if v is not None]
            if pts:
                ax.loglog(*zip(*pts), "-", lw=1, label="%s %d" % (name, i) if i < 6 else None)
    ax.set_xlabel("R")
    ax.set_ylabel("c(R)")
    ax.legend(fontsize=6)
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)
