"""
Result store for the gadget toolkit.
Writes rendered tables and summaries to an output directory.
"""
import logging
import os

from utils.errors import ConfigError

logger = logging.getLogger(__name__)


class ResultStore:
    """
    Manages the output directory of one experiment run.
    """

    def __init__(self, out_path):
        """
        Initialize the store.

        Args:
            out_path: Directory receiving the result files
        """
        if not out_path:
            raise ConfigError("No output path given")
        self.out_path = out_path

    def prepare(self):
        """
        Create the output directory if needed.
        """
        try:
            os.makedirs(self.out_path, exist_ok=True)
        except OSError as e:
            raise ConfigError(f"Error creating output directory: {str(e)}") from e

    def write_text(self, name, text):
        """
        Write one file.

        Args:
            name: File name inside the output directory
            text: File content

        Returns:
            Full path written
        """
        path = os.path.join(self.out_path, name)
        try:
            # newline="" keeps '\n' line ends on every platform
            with open(path, "w", encoding="utf-8", newline="") as handle:
                handle.write(text)
        except OSError as e:
            raise ConfigError(f"Error writing {path}: {str(e)}") from e
        logger.info("Wrote %s", path)
        return path

    def write_run(self, kind, csv_text, summary_text):
        """
        Write the table and summary of a run as <kind>.csv and <kind>.summary.json.

        Returns:
            List of paths written
        """
        if csv_text is None or summary_text is None:
            raise ConfigError("No results to write")
        self.prepare()
        return [
            self.write_text(f"{kind}.csv", csv_text),
            self.write_text(f"{kind}.summary.json", summary_text),
        ]
