"""Selection games on direct sums of groups: referee, strategies and tooling."""

from .groups import (
    BOX,
    PRODUCT,
    ComponentGroup,
    Element,
    GroupSpec,
    IDENTITY,
    Window,
    symmetric_group_3,
)
from .engine import COUNTABLE_ONE, G1_NBD, G1_OPEN, GameSpec, LegalityFault, Transcript, play, validate_transcript
from .schedule import CantorSchedule, pair, unpair

__version__ = "0.1.0"
