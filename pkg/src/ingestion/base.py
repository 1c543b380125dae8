"""
Base dataset source.

A source fetches raw labels and view tables, transforms them into a
validated MultiViewDataset and keeps counters for the log.
"""
from abc import ABC, abstractmethod
from datetime import datetime
from typing import Iterator, Optional
import logging

import numpy as np

from src.models.dataset import MultiViewDataset


class BaseDatasetSource(ABC):
    """
    Base class for all dataset sources.
    """

    def __init__(self, name: str):
        self.name = name
        self.logger = logging.getLogger(self.__class__.__name__)
        self.stats = self._empty_stats()

    @staticmethod
    def _empty_stats() -> dict:
        return {
            "views": 0,
            "rows": 0,
            "features": 0,
            "errors": 0,
            "started_at": None,
            "completed_at": None,
        }

    @abstractmethod
    def fetch_labels(self) -> Optional[np.ndarray]:
        """
        Fetch class indices in 0..C-1.

        Returns:
            (n,) int array, or None for unlabelled instances
        """
        pass

    @abstractmethod
    def fetch_views(self) -> Iterator[tuple[str, np.ndarray]]:
        """
        Fetch the views one by one.

        Yields:
            (view name, (n, m_q) float matrix)
        """
        pass

    def transform(
        self,
        views: list[tuple[str, np.ndarray]],
        labels: Optional[np.ndarray],
    ) -> MultiViewDataset:
        """
        Assemble the fetched parts into a dataset.

        Unlabelled sources get all-zero labels and skip the class checks.
        """
        names = [name for name, _ in views]
        arrays = [array for _, array in views]
        if labels is None:
            return MultiViewDataset.from_arrays(
                arrays,
                np.zeros(arrays[0].shape[0], dtype=np.int64),
                n_classes=1,
                view_names=names,
                name=self.name,
                require_all_classes=False,
            )
        return MultiViewDataset.from_arrays(
            arrays, labels, n_classes=self.n_classes(labels), view_names=names, name=self.name
        )

    def n_classes(self, labels: np.ndarray) -> int:
        """Class count C; override when it is declared rather than observed."""
        return int(labels.max()) + 1

    def run(self) -> MultiViewDataset:
        """
        Fetch, transform and validate the dataset.

        Returns:
            The validated MultiViewDataset
        """
        self.logger.info(f"Loading dataset {self.name}...")
        self.stats["started_at"] = datetime.now()

        try:
            labels = self.fetch_labels()
            views = []
            for view_name, array in self.fetch_views():
                views.append((view_name, array))
                self.stats["views"] += 1
                self.stats["features"] += array.shape[1]
                self.logger.debug(f"View {view_name}: {array.shape[0]} x {array.shape[1]}")
            dataset = self.transform(views, labels)
            self.stats["rows"] = dataset.n
            return dataset

        except Exception as e:
            self.stats["errors"] += 1
            self.logger.error(f"Failed to load {self.name}: {e}")
            raise

        finally:
            self.stats["completed_at"] = datetime.now()
            duration = self.stats["completed_at"] - self.stats["started_at"]
            self.logger.info(
                f"Loading complete. "
                f"Views: {self.stats['views']}, "
                f"Rows: {self.stats['rows']}, "
                f"Features: {self.stats['features']}, "
                f"Errors: {self.stats['errors']}, "
                f"Duration: {duration}"
            )

    def reset_stats(self):
        """Reset statistics counters"""
        self.stats = self._empty_stats()
