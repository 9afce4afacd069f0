"""
Base module class for all experiment runners
"""

import logging
from abc import ABC, abstractmethod
from typing import Dict, Any, Optional, Union, Callable, List

logger = logging.getLogger(__name__)

ProgressCallback = Callable[[int, str], None]


class ExperimentModule(ABC):
    """Base class for all experiment runners in Hubbard VQE Lab"""

    def __init__(self, name: str, config: Optional[Union['ExperimentConfig', Dict[str, Any]]] = None):
        self.name = name
        self.config = config or {}
        self._is_running = False
        self._result = None
        self._errors: List[str] = []
        self._progress_callbacks: List[ProgressCallback] = []

    @property
    def is_running(self) -> bool:
        """Check if module is currently running"""
        return self._is_running

    @property
    def result(self) -> Any:
        """Get the last result"""
        return self._result

    @property
    def errors(self) -> List[str]:
        """Errors recorded by the last run"""
        return list(self._errors)

    @abstractmethod
    def process(self, input_data: Any) -> Any:
        """Process input data and return result"""
        pass

    def run(self, input_data: Any = None) -> Any:
        """
        Run the module processing.

        Failures are logged and recorded; the exception is re-raised so the
        caller can map it to an exit status. Partial results stored by
        process() through set_partial_result() survive the failure.
        """
        self._errors = []
        try:
            self._is_running = True
            self.update_progress(0, f"Starting {self.name}...")

            if not self.validate_input(input_data):
                raise ValueError(f"Invalid input for {self.name}")

            result = self.process(input_data)

            self._result = result
            self.update_progress(100, f"{self.name} completed successfully")
            return result

        except Exception as e:
            message = f"Error in {self.name}: {str(e)}"
            self._errors.append(message)
            logger.error(message)
            raise

        finally:
            self._is_running = False

    def set_partial_result(self, result: Any):
        """Keep an intermediate result in case a later stage fails"""
        self._result = result

    def add_progress_callback(self, callback: ProgressCallback):
        """Register a listener for progress updates"""
        self._progress_callbacks.append(callback)

    def update_progress(self, percentage: int, message: str = ""):
        """Update progress during processing"""
        if message:
            logger.info("[%s] %3d%% %s", self.name, percentage, message)
        for callback in self._progress_callbacks:
            callback(percentage, message)

    def validate_input(self, input_data: Any) -> bool:
        """Validate input data before processing"""
        return True

    def get_config(self, key: str, default: Any = None) -> Any:
        """Get configuration value"""
        if isinstance(self.config, dict):
            return self.config.get(key, default)
        return getattr(self.config, key, default)
