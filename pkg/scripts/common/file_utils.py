"""
File helpers used by every writer in the project.

All CSVs go through pandas with round-trip float formatting, JSON is
written with sorted keys so that identical inputs give byte-identical files.
"""

import json
import logging
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def ensure_directory(filepath):
    """Create the parent directory of filepath if it doesn't exist"""
    directory = os.path.dirname(filepath)
    if directory and not os.path.exists(directory):
        try:
            os.makedirs(directory, exist_ok=True)
        except OSError as e:
            logger.error("Could not create directory %s: %s", directory, e)
            return False
    return True


def safe_save_csv(df, filepath, description):
    """Save a DataFrame as CSV with 17 significant digits"""
    try:
        if ensure_directory(filepath):
            df.to_csv(filepath, index=False, float_format=FLOAT_FORMAT)
            logger.info("Saved %s to %s", description, filepath)
            return True
    except OSError as e:
        logger.error("Failed to save %s to %s: %s", description, filepath, e)
    return False


def safe_save_json(payload, filepath, description):
    """Save a JSON document deterministically"""
    try:
        if ensure_directory(filepath):
            with open(filepath, "w", encoding="utf-8") as handle:
                json.dump(payload, handle, indent=2, sort_keys=True)
                handle.write("\n")
            logger.info("Saved %s to %s", description, filepath)
            return True
    except (OSError, TypeError) as e:
        logger.error("Failed to save %s to %s: %s", description, filepath, e)
    return False


def load_json(filepath):
    with open(filepath, "r", encoding="utf-8") as handle:
        return json.load(handle)


def safe_save_plot(filepath, description, dpi=300):
    """Save the current matplotlib figure and close it"""
    try:
        if ensure_directory(filepath):
            plt.savefig(filepath, dpi=dpi, bbox_inches="tight")
            logger.info("Saved %s to %s", description, filepath)
            return True
    except (OSError, ValueError) as e:
        logger.error("Failed to save %s to %s: %s", description, filepath, e)
    finally:
        plt.close()
    return False
