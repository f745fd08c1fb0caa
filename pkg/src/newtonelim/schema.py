"""JSON schema of problem files accepted by the command line front-end.

The same document is published as ``docs/problem-schema.json``; a test
keeps the two in sync.
"""

RATIONAL = {
    "oneOf": [
        {"type": "integer"},
        {"type": "string", "pattern": r"^\s*[-+]?\d+\s*(/\s*\d+\s*)?$"},
    ]
}

COEFFICIENT = {
    "oneOf": [
        {"type": "integer"},
        {"type": "string", "minLength": 1},
    ]
}

INT_VECTOR = {"type": "array", "items": {"type": "integer"}}

OPERATION_NAMES = (
    "mixed-volume", "fiber-polytope", "mixed-fiber", "composite-newton",
    "verify-star", "bernstein-count", "gk-sum", "kh-product", "vertex-ratio",
    "sqfree-mult", "check-developed", "oracle-solve", "plot",
)

PROBLEM_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "ProblemFile",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "polytopes": {
            "type": "object",
            "additionalProperties": {
                "type": "array",
                "minItems": 1,
                "items": {"type": "array", "items": RATIONAL},
            },
        },
        "polynomials": {
            "type": "object",
            "additionalProperties": {
                "type": "array",
                "items": {
                    "type": "array",
                    "prefixItems": [INT_VECTOR, COEFFICIENT],
                    "minItems": 2,
                    "maxItems": 2,
                },
            },
        },
        "projection": {"type": "array", "items": INT_VECTOR},
        "query": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "op": {"enum": list(OPERATION_NAMES)},
                "args": {"type": "object"},
            },
        },
    },
}
