# runner/__init__.py - Initialize the runner package

# Scenario parsing and execution entry points
from runner.scenario_config import ScenarioConfig, parse_config, load_config
from runner.scenario_runner import RunReport, run, fit_curve
