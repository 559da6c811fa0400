# Storage package: content-addressed result cache for expensive reports

from ..logging_config import get_logger

logger = get_logger("storage")
