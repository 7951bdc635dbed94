"""Pass/fail bookkeeping shared by the verifiers."""


class Tally:
    """Counts checks per relation and keeps the first counterexample of each."""

    def __init__(self, **envelope):
        self.envelope = envelope
        self.relations = {}

    def check(self, name, ok, witness=None):
        rel = self.relations.setdefault(name, {"checked": 0, "status": "pass", "witness": None})
        rel["checked"] += 1
        if not ok and rel["status"] == "pass":
            rel["status"] = "fail"
            rel["witness"] = witness() if callable(witness) else witness
        return ok

    @property
    def passed(self):
        return all(r["status"] == "pass" for r in self.relations.values())

    def first_failure(self):
        for name, r in sorted(self.relations.items()):
            if r["status"] == "fail":
                return name, r["witness"]
        return None

    def as_dict(self):
        return {"pass": self.passed, "envelope": self.envelope,
                "relations": {k: dict(v) for k, v in sorted(self.relations.items())}}
