import os
from dotenv import load_dotenv
from pathlib import Path
from typing import Optional, Union
import logging

# Load environment variables from .env file
load_dotenv()


def _env_float(name: str) -> Optional[float]:
    value = os.getenv(name)
    if value is None or value.strip() == "":
        return None
    try:
        return float(value)
    except ValueError:
        logging.warning(f"Ignoring {name}={value!r}: not a number")
        return None


class Config:
    def __init__(self, output_dir: Optional[Union[str, Path]] = None):
        self.base_dir = Path(__file__).parent
        self.config_folder = self.base_dir / "config"
        self.data_folder = Path(os.getenv("FEMRBF_DATA_DIR", self.base_dir / "data"))
        self.output_folder = Path(output_dir) if output_dir is not None else self.data_folder / "output"
        self.log_file = self.output_folder / "bench.log"
        self.default_suite_file = self.config_folder / "full_suite.json"

        # Run settings
        self.log_level = os.getenv("FEMRBF_LOG_LEVEL", "INFO").upper()
        self.final_time_override = _env_float("FEMRBF_FINAL_TIME")
        self.pinv_rtol = _env_float("FEMRBF_PINV_RTOL")
        workers = _env_float("FEMRBF_WORKERS")
        self.workers = max(1, int(workers)) if workers is not None else 1

        # Create directory structure
        self._initialize_directories()

    def _initialize_directories(self) -> None:
        """Create the output directory"""
        for directory in [self.output_folder]:
            try:
                directory.mkdir(parents=True, exist_ok=True)
                logging.info(f"Directory ensured: {directory}")
            except Exception as e:
                logging.error(f"Failed to create directory {directory}: {e}")
                raise

        if not self.default_suite_file.exists():
            logging.warning(f"Default suite file not found: {self.default_suite_file}")
