"""
Thue2DLite Core Module
"""
from .config import Config, load_config
from .task_manager import TaskManager
from .thue_core import ThueInstance, decide_equiv_bounded, find_separating_semigroup, parse_thue
