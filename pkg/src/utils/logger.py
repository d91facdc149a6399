"""
Logging system that logs locally and, per run, writes episode records as JSON lines.
"""
import json
import logging
import os
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, Optional

EPISODE_RECORD = "episode_record"


class EpisodeLogHandler(logging.Handler):
    """
    Logging handler that appends episode records to a JSON-lines file.

    Only records emitted through WorkbenchLogger.log_episode are written;
    everything else is ignored.

    @param path - Target file, truncated when the handler is created
    """
    def __init__(self, path: Path):
        super().__init__(level=logging.DEBUG)
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._stream = open(self.path, "w", encoding="utf-8")

    def emit(self, record: logging.LogRecord) -> None:
        """
        Write the structured payload of an episode record.

        @param record - Log record to write
        """
        payload = getattr(record, EPISODE_RECORD, None)
        if payload is None:
            return
        try:
            self._stream.write(json.dumps(payload, sort_keys=True) + "\n")
            self._stream.flush()
        except Exception:
            self.handleError(record)

    def close(self) -> None:
        """Close the underlying file."""
        try:
            if not self._stream.closed:
                self._stream.close()
        finally:
            super().close()


class WorkbenchLogger:
    """
    Logger class that handles console, file and per-run episode logging.
    """
    def __init__(
        self,
        name: str = "hybrid_marl",
        level: int = logging.INFO,
        log_file: Optional[str] = None,
    ):
        """
        Initialize logger with console and optional file handlers.

        @param name - Logger name
        @param level - Logging level
        @param log_file - Local log file path
        """
        self.logger = logging.getLogger(name)
        self.logger.setLevel(level)
        self.logger.propagate = False

        file_formatter = logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        )
        console_formatter = logging.Formatter(
            '%(levelname)s: %(message)s'
        )

        console_handler = logging.StreamHandler()
        console_handler.setFormatter(console_formatter)
        console_handler.setLevel(level)
        self.logger.addHandler(console_handler)

        if log_file:
            file_handler = logging.FileHandler(log_file)
            file_handler.setFormatter(file_formatter)
            file_handler.setLevel(level)
            self.logger.addHandler(file_handler)

    def log_run_event(
        self,
        run_id: str,
        status: str,
        metadata: Dict[str, Any],
        error: Optional[str] = None
    ) -> None:
        """
        Log a run lifecycle event.

        @param run_id - Run identifier (run directory name)
        @param status - Current run status
        @param metadata - Event metadata
        @param error - Error message if any
        """
        log_data = {
            "run_id": run_id,
            "status": status,
            "metadata": metadata,
        }

        if error:
            log_data["error"] = error
            self.logger.error(f"Run {run_id} failed at {status}: {error}", extra={"run_event": log_data})
        else:
            self.logger.info(f"Run {run_id}: {status}", extra={"run_event": log_data})

    def log_episode(self, episode: int, seed: int, p_drawn: Optional[float], episode_return: float) -> None:
        """
        Log one collected training episode.

        @param episode - Episode index within the run
        @param seed - Run seed
        @param p_drawn - Communication level drawn for the episode, if any
        @param episode_return - Undiscounted team return
        """
        payload = {
            "episode": episode,
            "seed": seed,
            "p_drawn": p_drawn,
            "return": episode_return,
        }
        self.logger.debug(
            f"episode {episode} return {episode_return:.3f}",
            extra={EPISODE_RECORD: payload},
        )

    @contextmanager
    def episode_log(self, path: Path) -> Iterator[EpisodeLogHandler]:
        """
        Attach an episode JSON-lines handler for the duration of a run.

        @param path - Output file
        """
        handler = EpisodeLogHandler(path)
        previous_level = self.logger.level
        self.logger.addHandler(handler)
        # Episode records are DEBUG; console and file handlers keep their own level.
        self.logger.setLevel(logging.DEBUG)
        try:
            yield handler
        finally:
            self.logger.setLevel(previous_level)
            self.logger.removeHandler(handler)
            handler.close()


# Create singleton instance
logger = WorkbenchLogger(log_file=os.getenv("HMARL_LOG_FILE"))
