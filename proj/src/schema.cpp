#include <string>

#include <json.hpp>

#include "celab/lab.hpp"

namespace celab {

using njson = nlohmann::json;

const std::string& report_schema_json() {
    static const std::string schema = R"SCHEMA({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "celab report",
  "definitions": {
    "point": {
      "oneOf": [
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        {"type": "string", "enum": ["inf"]}
      ]
    },
    "numseq": {"type": "array", "items": {"type": ["number", "null"]}},
    "intseq": {"type": "array", "items": {"type": "integer"}},
    "coeffs": {
      "type": "array",
      "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
    }
  },
  "type": "object",
  "required": ["schema_version", "tool", "config", "map", "verdicts", "estimates", "orbit",
               "consistency", "errors", "warnings"],
  "additionalProperties": false,
  "properties": {
    "schema_version": {"type": "integer"},
    "tool": {
      "type": "object",
      "required": ["name", "version"],
      "additionalProperties": false,
      "properties": {"name": {"type": "string"}, "version": {"type": "string"}}
    },
    "config": {
      "type": "object",
      "required": ["map", "horizons", "scale", "tce", "expshrink", "samples",
                   "julia_horizon", "sr", "seed", "branch_cap"],
      "additionalProperties": false,
      "properties": {
        "map": {
          "type": "object",
          "required": ["name", "param", "numerator", "denominator", "julia_overrides"],
          "additionalProperties": false,
          "properties": {
            "name": {"type": ["string", "null"]},
            "param": {
              "oneOf": [
                {"type": "null"},
                {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
              ]
            },
            "numerator": {"$ref": "#/definitions/coeffs"},
            "denominator": {"$ref": "#/definitions/coeffs"},
            "julia_overrides": {
              "type": "array",
              "items": {
                "type": "object",
                "required": ["point", "in_julia"],
                "additionalProperties": false,
                "properties": {
                  "point": {"$ref": "#/definitions/point"},
                  "in_julia": {"type": "boolean"}
                }
              }
            }
          }
        },
        "horizons": {
          "type": "object",
          "required": ["forward", "backward", "cover"],
          "additionalProperties": false,
          "properties": {
            "forward": {"type": "integer"},
            "backward": {"type": "integer"},
            "cover": {"type": "integer"}
          }
        },
        "scale": {
          "type": "object",
          "required": ["R", "R_prime"],
          "additionalProperties": false,
          "properties": {"R": {"type": "number"}, "R_prime": {"type": "number"}}
        },
        "tce": {
          "type": "object",
          "required": ["r", "M", "P", "z"],
          "additionalProperties": false,
          "properties": {
            "r": {"type": "number"},
            "M": {"type": "integer"},
            "P": {"type": "integer"},
            "z": {"oneOf": [{"type": "null"}, {"$ref": "#/definitions/point"}]}
          }
        },
        "expshrink": {
          "type": "object",
          "required": ["r", "anchor"],
          "additionalProperties": false,
          "properties": {"r": {"type": "number"}, "anchor": {"type": "string"}}
        },
        "samples": {
          "type": "object",
          "required": ["base", "branch", "circle", "julia"],
          "additionalProperties": false,
          "properties": {
            "base": {"type": "integer"},
            "branch": {"type": "integer"},
            "circle": {"type": "integer"},
            "julia": {"type": "integer"}
          }
        },
        "julia_horizon": {"type": "integer"},
        "sr": {
          "type": "object",
          "required": ["C"],
          "additionalProperties": false,
          "properties": {"C": {"type": ["number", "null"]}}
        },
        "seed": {"type": "integer"},
        "branch_cap": {"type": "integer"}
      }
    },
    "map": {
      "type": "object",
      "required": ["degree", "critical_points", "mu_max", "crit_prime_empty"],
      "additionalProperties": false,
      "properties": {
        "degree": {"type": "integer"},
        "critical_points": {
          "type": "array",
          "items": {
            "type": "object",
            "required": ["point", "mu", "in_julia", "warning"],
            "additionalProperties": false,
            "properties": {
              "point": {"$ref": "#/definitions/point"},
              "mu": {"type": "integer"},
              "in_julia": {"type": "boolean"},
              "warning": {"type": "boolean"}
            }
          }
        },
        "mu_max": {"type": ["integer", "null"]},
        "crit_prime_empty": {"type": "boolean"}
      }
    },
    "verdicts": {
      "type": "object",
      "required": ["vacuous", "note", "ce_observed", "ce2_observed", "expshrink_observed",
                   "sr_observed"],
      "additionalProperties": false,
      "properties": {
        "vacuous": {"type": "boolean"},
        "note": {"type": "string"},
        "ce_observed": {"type": ["boolean", "null"]},
        "ce2_observed": {"type": ["boolean", "null"]},
        "expshrink_observed": {"type": ["boolean", "null"]},
        "sr_observed": {"type": ["boolean", "null"]}
      }
    },
    "estimates": {
      "type": "object",
      "required": ["ce", "ce2", "sr", "expshrink", "first_return", "tce"],
      "additionalProperties": false,
      "properties": {
        "ce": {
          "oneOf": [
            {"type": "null"},
            {
              "type": "object",
              "required": ["lambda1", "C1", "observed", "critical_hit", "per_n_exponents",
                           "by_critical_point"],
              "additionalProperties": false,
              "properties": {
                "lambda1": {"type": ["number", "null"]},
                "C1": {"type": ["number", "null"]},
                "observed": {"type": "boolean"},
                "critical_hit": {"type": ["integer", "null"]},
                "per_n_exponents": {"$ref": "#/definitions/numseq"},
                "by_critical_point": {
                  "type": "array",
                  "items": {
                    "type": "object",
                    "required": ["point", "lambda1", "C1", "observed"],
                    "additionalProperties": false,
                    "properties": {
                      "point": {"$ref": "#/definitions/point"},
                      "lambda1": {"type": ["number", "null"]},
                      "C1": {"type": ["number", "null"]},
                      "observed": {"type": "boolean"}
                    }
                  }
                }
              }
            }
          ]
        },
        "ce2": {
          "oneOf": [
            {"type": "null"},
            {
              "type": "object",
              "required": ["lambda2", "C2", "observed", "per_n_min", "per_n_min_log",
                           "by_critical_point"],
              "additionalProperties": false,
              "properties": {
                "lambda2": {"type": ["number", "null"]},
                "C2": {"type": ["number", "null"]},
                "observed": {"type": "boolean"},
                "per_n_min": {"$ref": "#/definitions/numseq"},
                "per_n_min_log": {"$ref": "#/definitions/numseq"},
                "by_critical_point": {
                  "type": "array",
                  "items": {
                    "type": "object",
                    "required": ["point", "lambda2", "C2", "observed"],
                    "additionalProperties": false,
                    "properties": {
                      "point": {"$ref": "#/definitions/point"},
                      "lambda2": {"type": ["number", "null"]},
                      "C2": {"type": ["number", "null"]},
                      "observed": {"type": "boolean"}
                    }
                  }
                }
              }
            }
          ]
        },
        "sr": {
          "oneOf": [
            {"type": "null"},
            {
              "type": "object",
              "required": ["alpha", "C", "witness_n", "min_distance", "distance_series",
                           "by_critical_point"],
              "additionalProperties": false,
              "properties": {
                "alpha": {"type": "number"},
                "C": {"type": "number"},
                "witness_n": {"type": "integer"},
                "min_distance": {"type": "number"},
                "distance_series": {"$ref": "#/definitions/numseq"},
                "by_critical_point": {
                  "type": "array",
                  "items": {
                    "type": "object",
                    "required": ["point", "min_distance"],
                    "additionalProperties": false,
                    "properties": {
                      "point": {"$ref": "#/definitions/point"},
                      "min_distance": {"type": "number"}
                    }
                  }
                }
              }
            }
          ]
        },
        "expshrink": {
          "oneOf": [
            {"type": "null"},
            {
              "type": "object",
              "required": ["lambda_exp", "r_exp", "observed", "unreliable", "attempted",
                           "failed", "skipped_branches", "per_n_max_diam"],
              "additionalProperties": false,
              "properties": {
                "lambda_exp": {"type": ["number", "null"]},
                "r_exp": {"type": "number"},
                "observed": {"type": "boolean"},
                "unreliable": {"type": "boolean"},
                "attempted": {"type": "integer"},
                "failed": {"type": "integer"},
                "skipped_branches": {"type": "integer"},
                "per_n_max_diam": {"$ref": "#/definitions/numseq"}
              }
            }
          ]
        },
        "first_return": {
          "oneOf": [
            {"type": "null"},
            {
              "type": "object",
              "required": ["R", "K", "entries"],
              "additionalProperties": false,
              "properties": {
                "R": {"type": "number"},
                "K": {"type": ["number", "null"]},
                "entries": {
                  "type": "array",
                  "items": {
                    "type": "object",
                    "required": ["c", "m", "K_c"],
                    "additionalProperties": false,
                    "properties": {
                      "c": {"$ref": "#/definitions/point"},
                      "m": {"type": ["integer", "null"]},
                      "K_c": {"type": ["number", "null"]}
                    }
                  }
                }
              }
            }
          ]
        },
        "tce": {
          "oneOf": [
            {"type": "null"},
            {
              "type": "object",
              "required": ["pass", "z", "r", "M", "P", "horizon", "chosen_nj",
                           "per_j_counts", "all_counts", "skipped"],
              "additionalProperties": false,
              "properties": {
                "pass": {"type": "boolean"},
                "z": {"$ref": "#/definitions/point"},
                "r": {"type": "number"},
                "M": {"type": "integer"},
                "P": {"type": "integer"},
                "horizon": {"type": "integer"},
                "chosen_nj": {"$ref": "#/definitions/intseq"},
                "per_j_counts": {"$ref": "#/definitions/intseq"},
                "all_counts": {"$ref": "#/definitions/intseq"},
                "skipped": {"type": "integer"}
              }
            }
          ]
        }
      }
    },
    "orbit": {
      "oneOf": [
        {"type": "null"},
        {
          "type": "object",
          "required": ["z0", "points", "log_deriv_prefix", "critical_hit"],
          "additionalProperties": false,
          "properties": {
            "z0": {"$ref": "#/definitions/point"},
            "points": {"type": "array", "items": {"$ref": "#/definitions/point"}},
            "log_deriv_prefix": {"$ref": "#/definitions/numseq"},
            "critical_hit": {"type": ["integer", "null"]}
          }
        }
      ]
    },
    "consistency": {
      "oneOf": [
        {"type": "null"},
        {
          "type": "object",
          "required": ["normalization", "exponents", "gaps"],
          "additionalProperties": false,
          "properties": {
            "normalization": {"type": "string"},
            "exponents": {
              "type": "object",
              "required": ["ce", "ce2", "expshrink"],
              "additionalProperties": false,
              "properties": {
                "ce": {"type": ["number", "null"]},
                "ce2": {"type": ["number", "null"]},
                "expshrink": {"type": ["number", "null"]}
              }
            },
            "gaps": {
              "type": "object",
              "required": ["ce_ce2", "ce_expshrink", "ce2_expshrink"],
              "additionalProperties": false,
              "properties": {
                "ce_ce2": {"type": ["number", "null"]},
                "ce_expshrink": {"type": ["number", "null"]},
                "ce2_expshrink": {"type": ["number", "null"]}
              }
            }
          }
        }
      ]
    },
    "errors": {"type": "object", "additionalProperties": {"type": "string"}},
    "warnings": {"type": "array", "items": {"type": "string"}}
  }
})SCHEMA";
    return schema;
}

namespace {

bool type_matches(const njson& v, const std::string& t) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "number") return v.is_number();
    if (t == "integer") return v.is_number_integer() || v.is_number_unsigned();
    if (t == "boolean") return v.is_boolean();
    if (t == "null") return v.is_null();
    return false;
}

class Validator {
public:
    explicit Validator(const njson& root) : root_(root) {}

    void validate(const njson& v, const njson& schema, const std::string& path) const {
        const njson* s = &schema;
        njson resolved;
        if (s->contains("$ref")) {
            resolved = resolve_ref((*s)["$ref"].get<std::string>());
            s = &resolved;
        }
        if (s->contains("oneOf")) {
            for (const auto& alt : (*s)["oneOf"]) {
                try {
                    validate(v, alt, path);
                    return;
                } catch (const NumericError&) {
                }
            }
            throw NumericError("schema: no oneOf alternative matched at " + path);
        }
        if (s->contains("type")) {
            const njson& t = (*s)["type"];
            bool ok = false;
            if (t.is_string()) {
                ok = type_matches(v, t.get<std::string>());
            } else {
                for (const auto& alt : t)
                    if (type_matches(v, alt.get<std::string>())) ok = true;
            }
            if (!ok) throw NumericError("schema: type mismatch at " + path);
        }
        if (s->contains("enum")) {
            bool ok = false;
            for (const auto& e : (*s)["enum"])
                if (e == v) ok = true;
            if (!ok) throw NumericError("schema: enum mismatch at " + path);
        }
        if (v.is_object()) {
            const njson* props = s->contains("properties") ? &(*s)["properties"] : nullptr;
            if (s->contains("required")) {
                for (const auto& r : (*s)["required"])
                    if (!v.contains(r.get<std::string>()))
                        throw NumericError("schema: missing required key " +
                                           r.get<std::string>() + " at " + path);
            }
            for (auto it = v.begin(); it != v.end(); ++it) {
                if (props && props->contains(it.key())) {
                    validate(it.value(), (*props)[it.key()], path + "/" + it.key());
                } else if (s->contains("additionalProperties")) {
                    const njson& ap = (*s)["additionalProperties"];
                    if (ap.is_boolean()) {
                        if (!ap.get<bool>())
                            throw NumericError("schema: unexpected key " + it.key() + " at " +
                                               path);
                    } else {
                        validate(it.value(), ap, path + "/" + it.key());
                    }
                }
            }
        }
        if (v.is_array()) {
            if (s->contains("minItems") && v.size() < (*s)["minItems"].get<std::size_t>())
                throw NumericError("schema: too few items at " + path);
            if (s->contains("maxItems") && v.size() > (*s)["maxItems"].get<std::size_t>())
                throw NumericError("schema: too many items at " + path);
            if (s->contains("items")) {
                for (std::size_t i = 0; i < v.size(); ++i)
                    validate(v[i], (*s)["items"], path + "/" + std::to_string(i));
            }
        }
    }

private:
    njson resolve_ref(const std::string& ref) const {
        // supports local "#/a/b" references only
        if (ref.rfind("#/", 0) != 0) throw NumericError("schema: unsupported $ref " + ref);
        const njson* node = &root_;
        std::string rest = ref.substr(2);
        std::size_t pos = 0;
        while (pos < rest.size()) {
            std::size_t slash = rest.find('/', pos);
            std::string key = rest.substr(pos, slash == std::string::npos ? std::string::npos
                                                                          : slash - pos);
            if (!node->contains(key)) throw NumericError("schema: dangling $ref " + ref);
            node = &(*node)[key];
            if (slash == std::string::npos) break;
            pos = slash + 1;
        }
        return *node;
    }

    const njson& root_;
};

} // namespace

void validate_against_schema(const std::string& json_text, const std::string& schema_text) {
    njson v = njson::parse(json_text);
    njson s = njson::parse(schema_text);
    Validator validator(s);
    validator.validate(v, s, "");
}

} // namespace celab
