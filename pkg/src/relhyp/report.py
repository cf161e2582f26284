"""Line-oriented reports: ``KEY<TAB>VALUE`` records plus one VERDICT line."""

from __future__ import annotations

from dataclasses import dataclass, field

EXIT = {"Pass": 0, "Computed": 0, "Fail": 2, "Inconclusive": 3}


@dataclass
class Report:
    op: str
    verdict: str = "Computed"
    rows: list = field(default_factory=list)
    stamp: dict = field(default_factory=dict)  # radius=, witness=, ... on the VERDICT line

    def add(self, key, value):
        if "\t" in key or "\n" in key:
            raise ValueError(f"bad report key {key!r}")
        self.rows.append((key, _text(value)))
        return self

    def budgets(self, **kw):
        for k in sorted(kw):
            if kw[k] is not None:
                self.add(f"budget.{k}", kw[k])
        return self

    @property
    def exit_code(self):
        return EXIT[self.verdict]

    def render(self):
        lines = [f"OP\t{self.op}"]
        lines += [f"{k}\t{v}" for k, v in self.rows]
        tail = "".join(f" {k}={_text(v).replace(' ', '_')}" for k, v in self.stamp.items())
        lines.append(f"VERDICT {self.op} {self.verdict}{tail}")
        return "\n".join(lines) + "\n"

    def explain(self):
        """Human rendering; :func:`parse_report` reads it back."""
        width = max([len(k) for k, _ in self.rows] + [2])
        out = [f"== {self.op}: {self.verdict} =="]
        for k, v in self.stamp.items():
            out.append(f"   @ {k} = {_text(v)}")
        for k, v in self.rows:
            out.append(f"   {k.ljust(width)} : {v}")
        return "\n".join(out) + "\n"


def _text(v):
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        return f"{v:.6f}"
    if isinstance(v, (list, tuple)):
        return ",".join(_text(x) for x in v) if v else "-"
    s = str(v)
    if "\n" in s or "\t" in s:
        raise ValueError(f"report values must be single-line: {s!r}")
    return s if s else "-"


def parse_report(text):
    """Inverse of :meth:`Report.render` and :meth:`Report.explain`."""
    lines = text.rstrip("\n").split("\n")
    if lines[0].startswith("== "):
        head = lines[0][3:-3]
        op, verdict = head.rsplit(": ", 1)
        rep = Report(op, verdict)
        for line in lines[1:]:
            body = line[3:]
            if body.startswith("@ "):
                k, v = body[2:].split(" = ", 1)
                rep.stamp[k] = v
            else:
                k, v = body.split(" : ", 1)
                rep.rows.append((k.rstrip(), v))
        return rep
    op = lines[0].split("\t", 1)[1]
    last = lines[-1].split(" ")
    rep = Report(op, last[2])
    for tok in last[3:]:
        k, v = tok.split("=", 1)
        rep.stamp[k] = v
    for line in lines[1:-1]:
        k, v = line.split("\t", 1)
        rep.rows.append((k, v))
    return rep
