# gaussian_petz/utils/logging_utils.py
import sys


def log_manager(message, colors=None, level="INFO", prefix="[PETZ] ", end="\n", flush=True, stream=None):
    """
    Centralized logging for the library, services and command line.
    Args:
        message (str): The message to print.
        colors (Colors, optional): Colors class for formatting. If None, no color.
        level (str): One of INFO, SUCCESS, WARNING, ERROR, BOLD.
        prefix (str): Prefix for the log line, one per component.
        end (str): End character for print.
        flush (bool): Whether to flush output.
        stream (file, optional): Target stream. Defaults to stderr so that
            JSON written to stdout stays machine readable.
    """
    if colors is None:
        color = ""
        endc = ""
    else:
        color = getattr(colors, level, "")
        endc = colors.ENDC
    print(f"{prefix}{color}{message}{endc}", end=end, flush=flush, file=stream or sys.stderr)
