"""Exception and warning types shared across the package."""


class ChrisimosError(Exception):
    """Base class for all domain errors raised by this package."""


# --- graph container / file format ---------------------------------------

class MalformedHeader(ChrisimosError):
    pass


class VertexOutOfRange(ChrisimosError):
    pass


class SelfLoop(ChrisimosError):
    pass


class EmptyGraph(ChrisimosError):
    pass


class DuplicateEdge(UserWarning):
    """Duplicate edges are dropped; the loader warns instead of failing."""


class InvalidModelParams(ChrisimosError):
    pass


class RetryExhausted(ChrisimosError):
    """A generator could not reach minimum degree 1 within the retry cap."""


# --- bit rules ------------------------------------------------------------

class ChunkUnderflow(ChrisimosError):
    """Mirror-side chunk size would be zero (doubled min degree above n)."""


class IndexOutOfRange(ChrisimosError):
    pass


# --- mining ---------------------------------------------------------------

class TooLarge(ChrisimosError):
    """Exhaustive search refused: instance above the hard size cap."""


class MiningAbort(ChrisimosError):
    pass


class AbortBadInstance(MiningAbort):
    """Instance failed the pre-mining guards (digest / signature / id)."""


class AbortNoSolution(MiningAbort):
    """Deadline reached without a result inside the permissible bound."""


# --- ledger ---------------------------------------------------------------

class EmptySet(ChrisimosError):
    pass


class MalformedBlock(ChrisimosError):
    pass


# --- verification / retrieval ----------------------------------------------

class NotDominatingG(ChrisimosError):
    """Retrieval could not dominate the base graph (impossible for
    blocks that passed verification; kept as a hard assertion)."""


# --- chain selection --------------------------------------------------------

class IncompatibleGenesis(ChrisimosError):
    pass


class HeightOutOfRange(ChrisimosError):
    pass


# --- timing table -----------------------------------------------------------

class EmptyTable(ChrisimosError):
    pass


# --- simulation ---------------------------------------------------------------

class UnknownScenario(ChrisimosError):
    pass
