# Oracle package: brute-force quotient order complexes at small n

from ..logging_config import get_logger

logger = get_logger("oracle")
logger.debug("Quotient oracle initialized")
