"""
Thue2DLite Task Manager - parallel fan-out of independent checks
Runs verification checks on a thread pool and keeps per-task state, timings
and errors for the report.
"""
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Dict, List, Any, Callable, Optional
import time
import logging

PENDING = 'pending'
RUNNING = 'running'
COMPLETED = 'completed'
FAILED = 'failed'


@dataclass
class SubTask:
    func: Callable
    args: tuple = ()
    kwargs: Dict[str, Any] = field(default_factory=dict)
    status: str = PENDING
    start_time: Optional[float] = None
    end_time: Optional[float] = None
    error: Optional[str] = None

    @property
    def seconds(self) -> float:
        if self.start_time is None or self.end_time is None:
            return 0.0
        return self.end_time - self.start_time


class TaskManager:
    def __init__(self, max_workers: int = 4):
        self.max_workers = max_workers
        self.executor = ThreadPoolExecutor(max_workers=max_workers)
        self.tasks: Dict[str, SubTask] = {}
        self.logger = logging.getLogger(__name__)

    def __enter__(self) -> "TaskManager":
        return self

    def __exit__(self, *exc) -> None:
        self.shutdown()

    def create_subtask(self, task_id: str, func: Callable, *args, **kwargs) -> str:
        """
        Register a check for later execution.

        Args:
            task_id: Unique identifier (the check name)
            func: Callable returning the check record
            *args, **kwargs: Arguments for the callable
        """
        if task_id in self.tasks:
            raise ValueError(f"Task ID {task_id} already exists")
        self.tasks[task_id] = SubTask(func, args, kwargs)
        return task_id

    def execute_parallel_tasks(self, task_ids: List[str]) -> Dict[str, Any]:
        """
        Execute tasks on the pool.

        Returns:
            {task_id: result}, or {task_id: {'error': message}} for a task
            that raised. Keys follow task_ids order, not completion order.
        """
        missing = [task_id for task_id in task_ids if task_id not in self.tasks]
        if missing:
            raise ValueError(f"Task ID {missing[0]} not found")
        futures = {self.executor.submit(self._run, self.tasks[task_id]): task_id for task_id in task_ids}

        results = {}
        for future in as_completed(futures):
            task_id = futures[future]
            try:
                results[task_id] = future.result()
            except Exception as e:
                self.logger.error(f"Task {task_id} failed: {e}")
                results[task_id] = {'error': str(e)}
        return {task_id: results[task_id] for task_id in task_ids}

    @staticmethod
    def _run(task: SubTask) -> Any:
        task.status = RUNNING
        task.start_time = time.time()
        try:
            result = task.func(*task.args, **task.kwargs)
            task.status = COMPLETED
            return result
        except Exception as e:
            task.status = FAILED
            task.error = str(e)
            raise
        finally:
            task.end_time = time.time()

    def get_task_status(self, task_id: str) -> Dict[str, Any]:
        """State, error and wall time of one task"""
        if task_id not in self.tasks:
            raise ValueError(f"Task ID {task_id} not found")
        task = self.tasks[task_id]
        return {'status': task.status, 'error': task.error, 'seconds': task.seconds}

    def shutdown(self):
        self.executor.shutdown(wait=True)
