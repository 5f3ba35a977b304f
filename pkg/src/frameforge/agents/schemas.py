"""JSON schemas for every agent role's output; validated before acceptance."""

from __future__ import annotations

import jsonschema

from ..errors import SchemaViolation

_NUMBER = {"type": "number"}
_INT = {"type": "integer"}
_STR = {"type": "string"}

_STEP_HEADER = {
    "Step_number": _INT,
    "Bay_number": _INT,
    "Story_number": _INT,
    "Step_type": {"type": ["string", "integer"]},
}

PROBLEM_ANALYSIS_SCHEMA = {
    "type": "object",
    "required": ["Geometry", "Supports", "Material", "Loads"],
    "properties": {
        "Geometry": {
            "type": "object",
            "required": ["Total_bays", "Total_stories", "Bay_data"],
            "properties": {
                "Total_bays": _INT,
                "Total_stories": _INT,
                "Bay_data": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["Bay", "Span", "Story_count", "Heights"],
                        "properties": {
                            "Bay": _INT, "Span": _NUMBER, "Story_count": _INT,
                            "Heights": {"type": "array", "items": _NUMBER},
                        },
                    },
                },
            },
        },
        "Supports": {
            "type": "object",
            "required": ["Type", "Location"],
            "properties": {"Type": _STR, "Location": _STR},
        },
        "Material": {
            "type": "object",
            "required": ["E", "A_col", "A_gir", "I_col", "I_gir"],
            "properties": {k: _NUMBER for k in ("E", "A_col", "A_gir", "I_col", "I_gir")},
        },
        "Loads": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["Type", "Location", "Direction", "Magnitude"],
                "properties": {"Type": _STR, "Location": _STR,
                               "Direction": _STR, "Magnitude": _NUMBER},
            },
        },
    },
}

CONSTRUCTION_PLANNING_SCHEMA = {
    "type": "object",
    "required": ["Construction_steps"],
    "properties": {
        "Construction_steps": {
            "type": "array",
            "items": {
                "type": "object",
                "required": list(_STEP_HEADER),
                "properties": dict(_STEP_HEADER),
            },
        },
    },
}

NODE_SCHEMA = {
    "type": "object",
    "required": ["Construction_steps"],
    "properties": {
        "Construction_steps": {
            "type": "array",
            "items": {
                "type": "object",
                "required": list(_STEP_HEADER) + ["Nodes"],
                "properties": {
                    **_STEP_HEADER,
                    "Nodes": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["ID", "x", "y"],
                            "properties": {"ID": _INT, "x": _NUMBER, "y": _NUMBER,
                                           "Description": _STR},
                        },
                    },
                    "Boundary_conditions": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["Node_ID", "Constraints"],
                            "properties": {"Node_ID": _INT, "Constraints": _STR},
                        },
                    },
                },
            },
        },
    },
}

ELEMENT_SCHEMA = {
    "type": "object",
    "required": ["Construction_steps"],
    "properties": {
        "Construction_steps": {
            "type": "array",
            "items": {
                "type": "object",
                "required": list(_STEP_HEADER) + ["Elements"],
                "properties": {
                    **_STEP_HEADER,
                    "Elements": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["ID", "Coord_i", "Coord_j"],
                            "properties": {
                                "ID": _INT,
                                "Coord_i": {"type": "array", "items": _NUMBER,
                                            "minItems": 2, "maxItems": 2},
                                "Coord_j": {"type": "array", "items": _NUMBER,
                                            "minItems": 2, "maxItems": 2},
                                "Description": _STR,
                            },
                        },
                    },
                },
            },
        },
    },
}

LOAD_ASSIGNMENT_SCHEMA = {
    "type": "object",
    "required": ["nodal_loads", "member_loads"],
    "properties": {
        "nodal_loads": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["Node_ID", "Fx", "Fy"],
                "properties": {"Node_ID": _INT, "Fx": _NUMBER, "Fy": _NUMBER,
                               "Mz": _NUMBER},
            },
        },
        "member_loads": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["Element_ID", "w"],
                "properties": {"Element_ID": _INT, "w": _NUMBER},
            },
        },
    },
}

GEOMETRY_TRANSLATOR_SCHEMA = {
    "type": "object",
    "required": ["geometry_blocks"],
    "properties": {
        "geometry_blocks": {
            "type": "array", "items": _STR, "minItems": 3, "maxItems": 3,
        },
    },
}

COMPLETE_GENERATOR_SCHEMA = {
    "type": "object",
    "required": ["script"],
    "properties": {"script": _STR},
}

ROLE_SCHEMAS = {
    "problem_analysis": PROBLEM_ANALYSIS_SCHEMA,
    "construction_planning": CONSTRUCTION_PLANNING_SCHEMA,
    "node": NODE_SCHEMA,
    "element": ELEMENT_SCHEMA,
    "load_assignment": LOAD_ASSIGNMENT_SCHEMA,
    "geometry_translator": GEOMETRY_TRANSLATOR_SCHEMA,
    "complete_generator": COMPLETE_GENERATOR_SCHEMA,
}


def validate_role_output(role: str, doc: dict) -> None:
    try:
        jsonschema.validate(doc, ROLE_SCHEMAS[role])
    except jsonschema.ValidationError as exc:
        raise SchemaViolation(role, exc.message) from exc
