# Homology package: chain complexes, exact ranks, Morse matchings, Sigma aggregation

from ..logging_config import get_logger

logger = get_logger("homology")
logger.debug("Homology engine initialized")
