"""
Photon GBD Server - Flask Application
JSON surface over the command layer: distributions, figure data, verification,
Monte Carlo oracles and splitting-device scenarios
"""
import logging
from typing import Any, Dict, List, Optional

from flask import Flask, jsonify, request
from flask_cors import CORS

# Import our modules
from config.settings import get_config
from photon_gbd.commands import (
    cmd_figures, cmd_gbd, cmd_pmf, cmd_sample, cmd_scenario, cmd_verify
)
from photon_gbd.report_writer import report_payload
from photon_gbd.utils import (
    BudgetExhaustedError, NumericalError, ValidationError, require_count, setup_logging
)

# Initialize Flask app
app = Flask(__name__)
config = get_config()
app.config.from_object(config)
CORS(app)

# Setup logging
logger = setup_logging(config.LOG_LEVEL, config.LOG_FILE)

VERSION = "1.0.0"


# Error handlers
@app.errorhandler(ValidationError)
def handle_validation_error(error):
    logger.warning(f"Rejected request: {error}")
    return jsonify({"error": "Validation Error", "message": str(error)}), 400


@app.errorhandler(BudgetExhaustedError)
def handle_budget_error(error):
    logger.error(f"Sampling budget exhausted: {error}")
    return jsonify({
        "error": "Sampling Budget Exhausted",
        "message": str(error),
        "accepted": error.accepted,
        "attempts": error.attempts,
        "acceptance_rate": error.acceptance_rate,
    }), 503


@app.errorhandler(NumericalError)
def handle_numerical_error(error):
    logger.error(f"Numerical error: {error}")
    return jsonify({"error": "Numerical Error", "message": str(error)}), 500


@app.errorhandler(500)
def handle_internal_error(error):
    logger.error(f"Internal server error: {str(error)}")
    return jsonify({"error": "Internal Server Error", "message": "An unexpected error occurred"}), 500


# Helper functions
def get_request_data() -> Dict[str, Any]:
    data = request.get_json(silent=True)
    if not isinstance(data, dict):
        raise ValidationError("Request body must be a JSON object")
    return data


def validate_request_data(data: Dict[str, Any], required_fields: List[str]) -> None:
    """Validate that required fields are present in request data"""
    missing_fields = [field for field in required_fields if field not in data]
    if missing_fields:
        raise ValidationError(f"Missing required fields: {', '.join(missing_fields)}")


def parse_number(data: Dict[str, Any], name: str) -> Optional[float]:
    """Optional numeric field; None when absent"""
    value = data.get(name)
    if value is None:
        return None
    if isinstance(value, bool):
        raise ValidationError(f"{name} must be a number, got: {value!r}")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{name} must be a number, got: {value!r}")


def parse_count(data: Dict[str, Any], name: str) -> Optional[int]:
    """Optional nonnegative integer field; fractional values are rejected, not truncated"""
    value = data.get(name)
    if value is None:
        return None
    if isinstance(value, str):
        try:
            value = int(value.strip())
        except ValueError:
            raise ValidationError(f"{name} must be a nonnegative integer, got: {value!r}")
    return require_count(value, name)



def parse_numbers(data: Dict[str, Any], name: str) -> Optional[List[float]]:
    values = data.get(name)
    if values is None:
        return None
    if not isinstance(values, list):
        raise ValidationError(f"{name} must be a list of numbers")
    return [parse_number({name: v}, name) for v in values]


# API Routes

@app.route('/', methods=['GET'])
def health_check():
    """Health check endpoint"""
    return jsonify({
        "status": "healthy",
        "service": "Photon GBD Server",
        "version": VERSION,
        "schema_version": config.SCHEMA_VERSION
    })


@app.route('/api/pmf', methods=['POST'])
def photon_count_distribution():
    """Photon-count distribution of one model in one volume"""
    data = get_request_data()
    validate_request_data(data, ['model'])
    report = cmd_pmf(
        data['model'],
        volume=parse_number(data, 'volume'),
        w=parse_number(data, 'w'),
        gamma=parse_number(data, 'gamma'),
        photon_rate=parse_number(data, 'photon_rate'),
        tau=parse_number(data, 'tau'),
        k_max=parse_count(data, 'k_max')
    )
    payload = report_payload(report)
    return jsonify({
        "rows": payload['rows'],
        "tail_bound": payload['checks']['tail_bound'],
        "parameters": payload['parameters']
    })


@app.route('/api/gbd', methods=['POST'])
def generalized_binomial():
    """One row of the generalized binomial distribution"""
    data = get_request_data()
    validate_request_data(data, ['model', 'A', 'B', 'n'])
    report = cmd_gbd(
        data['model'],
        parse_number(data, 'A'),
        parse_number(data, 'B'),
        parse_count(data, 'n'),
        w=parse_number(data, 'w'),
        gamma=parse_number(data, 'gamma'),
        photon_rate=parse_number(data, 'photon_rate')
    )
    payload = report_payload(report)
    return jsonify({
        "rows": payload['rows'],
        "split": {"alpha": payload['checks']['alpha'], "beta": 1.0 - payload['checks']['alpha']},
        "checks": payload['checks']
    })


@app.route('/api/figures/<which>', methods=['GET'])
def figure_data(which: str):
    """Figure data table; grid parameters come from the query string"""
    args = request.args
    s_values = args.get('s_values')
    report = cmd_figures(
        which,
        alpha=parse_number(args, 'alpha'),
        s_min=parse_number(args, 's_min'),
        s_max=parse_number(args, 's_max'),
        points=parse_count(args, 'points'),
        n=parse_count(args, 'n'),
        s_values=parse_numbers({'s_values': s_values.split(',')}, 's_values') if s_values else None
    )
    payload = report_payload(report)
    columns = list(payload['rows'][0].keys()) if payload['rows'] else []
    return jsonify({
        "figure": which,
        "columns": columns,
        "rows": [[row[c] for c in columns] for row in payload['rows']],
        "checks": payload['checks'],
        "passed": payload['passed']
    })


@app.route('/api/verify', methods=['POST'])
def verify():
    """Run verification suites; failures are reported in the body, not the status"""
    data = request.get_json(silent=True) or {}
    report = cmd_verify(data.get('suite', 'all'), detail=bool(data.get('detail', False)))
    payload = report_payload(report)
    return jsonify({"suites": payload['rows'], "passed": payload['passed']})


@app.route('/api/sample', methods=['POST'])
def sample():
    """Monte Carlo histogram compared with its analytic law"""
    data = get_request_data()
    validate_request_data(data, ['target'])
    M = parse_count(data, 'M')
    report = cmd_sample(
        data['target'],
        M if M is not None else config.MIN_SAMPLE_DRAWS * 100,
        seed=parse_count(data, 'seed'),
        n=parse_count(data, 'n'),
        alpha=parse_number(data, 'alpha'),
        S=parse_number(data, 'S'),
        mean=parse_number(data, 'mean'),
        A=parse_number(data, 'A'),
        B=parse_number(data, 'B'),
        w=parse_number(data, 'w'),
        model=data.get('model', 'be'),
        shards=parse_count(data, 'shards')
    )
    return jsonify(report_payload(report))


@app.route('/api/scenario', methods=['POST'])
def scenario():
    """Joint and marginal output tables behind a splitting device"""
    data = get_request_data()
    validate_request_data(data, ['device', 'alpha', 'model', 'S'])
    report = cmd_scenario(
        data['device'],
        parse_number(data, 'alpha'),
        data['model'],
        parse_number(data, 'S'),
        w=parse_number(data, 'w'),
        gamma=parse_number(data, 'gamma'),
        photon_rate=parse_number(data, 'photon_rate'),
        cascade_alphas=parse_numbers(data, 'cascade'),
        n_max=parse_count(data, 'n_max')
    )
    payload = report_payload(report)
    tables: Dict[str, List[Dict[str, Any]]] = {"joint": [], "transmitted": [], "complementary": []}
    for row in payload['rows']:
        entry = {k: v for k, v in row.items() if k != 'table' and v is not None}
        tables[row['table']].append(entry)
    return jsonify({
        **tables,
        "checks": payload['checks'],
        "parameters": payload['parameters'],
        "passed": payload['passed']
    })


if __name__ == '__main__':
    logger.info("Starting Photon GBD Server...")
    logger.info(f"Configuration: {config.__name__}")

    app.run(
        host=config.HOST,
        port=config.PORT,
        debug=config.DEBUG
    )
