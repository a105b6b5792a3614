import logging
from pathlib import Path

LOGGER_NAME = "mdtd"
LOG_FORMAT = "%(asctime)s - %(levelname)s - %(name)s - %(message)s"


def setup_logger(
    log_name: str = "logfile",
    level: int = logging.INFO,
    folder: str | Path = ".",
):
    """
    Attach a file handler to the "mdtd" logger and return it.

    Every experiment, sweep and check writes to <folder>/<log_name>.log inside
    its result folder. Component loggers from get_logger propagate into this
    file. A logger that already has a handler is returned as is, so nested
    calls never duplicate lines.

    Args:
        log_name (str, optional): Log file name without the .log extension.
                                  Default: "logfile" (the `logName` config key)
        level (int, optional): Logging level (e.g. logging.INFO, logging.DEBUG).
                               Default: logging.INFO
        folder (str | Path, optional): Result folder; created if missing.
                                       Default: "." (current directory)

    Returns:
        logging.Logger: The "mdtd" logger.

    Example:
        logger = setup_logger("log", level=logging.DEBUG, folder="results/input")
        logger.info("Experiment started.")
    """
    logger = logging.getLogger(LOGGER_NAME)
    if logger.handlers:
        return logger

    logger.setLevel(level)
    folder = Path(folder)
    folder.mkdir(parents=True, exist_ok=True)

    # Overwritten on every run
    file_handler = logging.FileHandler(folder / f"{log_name}.log", mode="w")
    file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(file_handler)
    logger.propagate = False
    return logger


def get_logger(component: str) -> logging.Logger:
    """Child logger `mdtd.<component>`; silent until setup_logger attaches a file."""
    return logging.getLogger(f"{LOGGER_NAME}.{component}")


def reset_logger():
    """Detach and close every handler of the "mdtd" logger (one log file per config in batch mode)."""
    base_logger = logging.getLogger(LOGGER_NAME)
    for h in list(base_logger.handlers):
        base_logger.removeHandler(h)
        h.close()
