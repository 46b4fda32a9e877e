import logging

import click_log

logger = logging.getLogger('livesim')

# configure the logger to use the click settings, the CLI verbosity option drives it
click_log.basic_config(logger)
