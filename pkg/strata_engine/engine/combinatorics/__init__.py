# Combinatorics package: number/set partitions, marked forests, bracketed posets

from ..logging_config import get_logger

logger = get_logger("combinatorics")
logger.debug("Combinatorics engine initialized")
