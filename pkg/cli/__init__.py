"""Command-line front end of abc-control"""
from .app import main
from .errors import ScenarioError
from .scenario import ControlSettings, ScenarioConfig, load_scenario, parse_spatial, parse_time

__all__ = [
    'ControlSettings',
    'ScenarioConfig',
    'ScenarioError',
    'load_scenario',
    'main',
    'parse_spatial',
    'parse_time',
]
