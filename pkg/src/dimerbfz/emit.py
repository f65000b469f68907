"""DOT and TikZ emitters for BFZ quivers on their cylinder layout."""

from __future__ import annotations

from .bfz import BfzQuiver
from .cylinder import CylinderLayout


def to_dot(q: BfzQuiver) -> str:
    lines = ["digraph bfz {", "  rankdir=BT;"]
    for v in q.quiver.vertices:
        shape = "box" if v.frozen else "circle"
        lines.append(f'  "{v.id}" [shape={shape}, label="{v.id}:{q.letter(v.id)}"];')
    for a in q.quiver.arrows:
        style = ' [style=dashed]' if q.kinds.get(a.id) == "inclined" else ""
        lines.append(f'  "{a.src}" -> "{a.tgt}"{style};')
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_tikz(q: BfzQuiver, layout: CylinderLayout, xgap: float = 1.5, ygap: float = 0.8) -> str:
    """Book-style picture: one scope per sheet, strings as vertical lines."""
    deco = layout.decomposition
    out = ["\\begin{tikzpicture}[>=stealth]"]
    offset = 0.0
    max_h = max(layout.height.values(), default=0)
    for r in range(deco.sheet_count):
        path = deco.strings_of_sheet(r)
        out.append(f"  \\begin{{scope}}[xshift={offset:.2f}cm]")
        for i, s in enumerate(path):
            x = i * xgap
            out.append(
                f"    \\draw[gray] ({x:.2f},0) -- ({x:.2f},{(max_h + 1) * ygap:.2f});"
            )
            out.append(
                f"    \\node[below] at ({x:.2f},0) {{\\scriptsize ${s}$}};"
            )
        coords = layout.sheet_coords(r)
        for v in sorted(coords):
            x, h = coords[v]
            frozen = q.quiver.vertex(v).frozen
            style = "rectangle,draw,fill=white" if frozen else "circle,fill"
            out.append(
                f"    \\node[{style},inner sep=1.6pt,label=right:{{\\tiny ${v}$}}]"
                f" (s{r}v{v}) at ({x * xgap:.2f},{(h + 1) * ygap:.2f}) {{}};"
            )
        # arrows on a shared string are drawn on every sheet containing it,
        # like the glued strings in the book-style figures
        for a in q.quiver.arrows:
            if a.src in coords and a.tgt in coords:
                out.append(f"    \\draw[->] (s{r}v{a.src}) -- (s{r}v{a.tgt});")
        out.append("  \\end{scope}")
        offset += (len(path) - 1) * xgap + 2.0
    out.append("\\end{tikzpicture}")
    return "\n".join(out) + "\n"
