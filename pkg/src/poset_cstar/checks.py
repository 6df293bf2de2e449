from dataclasses import dataclass
from typing import Any


@dataclass(frozen=True)
class Check:
    """Outcome of a law check; truthy iff it passed.

    ``witness`` holds the first counterexample found when the check fails.
    """

    passed: bool
    witness: Any = None
    detail: str = ""

    def __bool__(self):
        return self.passed

    def to_json(self):
        out = {"passed": self.passed}
        if self.witness is not None:
            out["witness"] = _jsonable(self.witness)
        if self.detail:
            out["detail"] = self.detail
        return out


PASS = Check(True)


def _jsonable(obj):
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [_jsonable(x) for x in obj]
        return sorted(items, key=repr) if isinstance(obj, (set, frozenset)) else items
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    return str(obj)
