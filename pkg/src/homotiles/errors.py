class TheoremFalsified(RuntimeError):
    """A statement that is proved to hold was contradicted by a computation.

    Raised by the checkers when two exact routes disagree or a structure
    claimed for every tile is missing. Seeing this means either a bug here
    or a counterexample; both stop the run.
    """

    def __init__(self, claim: str, detail: str = "", witness=None):
        self.claim = claim
        self.detail = detail
        self.witness = witness
        msg = claim if not detail else f"{claim}: {detail}"
        super().__init__(msg)


class BudgetExceeded(RuntimeError):
    """An exhaustive search would exceed its configured budget.

    ``partial`` holds whatever was computed before the limit was hit
    (possibly nothing), so callers can still report it, flagged incomplete.
    """

    def __init__(self, needed: int, budget: int, partial=None):
        self.needed = needed
        self.budget = budget
        self.partial = partial
        super().__init__(f"search needs {needed} candidates, budget is {budget}")
