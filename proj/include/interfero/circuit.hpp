#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "interfero/mode_algebra.hpp"

namespace interfero {

struct SourcePos {
    int line = 0;
    int column = 0;
};

/// Beam-splitter coefficients as written in a circuit file: either the
/// `balanced` keyword or four explicit `coeffs` numbers.
struct BsSpecLiteral {
    bool balanced = true;
    double r_mag = 0.0;
    double t_mag = 0.0;
    double phi_r = 0.0;
    double phi_t = 0.0;

    BeamSplitterSpec resolve() const;
    bool operator==(const BsSpecLiteral& other) const;
};

/// A phase angle: literal radians or a named parameter bound at elaboration.
struct PhaseValue {
    bool is_parameter = false;
    double literal = 0.0;
    std::string parameter;

    bool operator==(const PhaseValue& other) const;
};

struct BeamSplitterElement {
    std::string name;
    BsSpecLiteral spec;
    std::array<std::string, 2> inputs;
    std::array<std::string, 2> outputs;
    bool removable = false;
    SourcePos pos;
};

struct PhaseElement {
    std::string name;
    std::string mode;  // acts in place; the label stays live
    PhaseValue value;
    SourcePos pos;
};

struct MirrorElement {
    std::string name;
    std::string input;
    std::string output;
    SourcePos pos;
};

using Element = std::variant<BeamSplitterElement, PhaseElement, MirrorElement>;

struct DetectorBinding {
    std::string detector;
    std::string mode;
    SourcePos pos;
};

/// Parsed circuit: declared input modes, elements in propagation order, and
/// detector bindings resolved against the final live modes. The simulated
/// photon enters the first declared mode.
struct CircuitDescription {
    std::string source_name;
    std::vector<std::string> input_modes;
    std::vector<std::string> parameters;
    std::vector<Element> elements;
    std::vector<DetectorBinding> detectors;

    std::vector<std::string> removable_names() const;
    /// Mode labels live after the last element, in positional order.
    std::vector<std::string> final_modes() const;

    /// Structural equality; source positions are ignored.
    bool operator==(const CircuitDescription& other) const;
};

/// Parses circuit text. Grammar (one statement per `;`, `#` comments):
///   modes  <label>...;
///   param  <name>;
///   bs     <name> (balanced | coeffs <r> <t> <phi_r> <phi_t>)
///          <in1> <in2> -> <out1> <out2> [removable];
///   phase  <name> <mode> (<radians> | <param>);
///   mirror <name> <in> -> <out>;
///   detect <detector> <mode>;
/// Throws SyntaxError with line/column and expected tokens, or SemanticError
/// for undeclared modes, reused labels, invalid splitter coefficients, and
/// unresolvable detector bindings.
CircuitDescription parse_circuit(std::string_view text, std::string source_name = "<memory>");

/// Canonical text form; parse(pretty_print(parse(t))) == parse(t).
std::string pretty_print(const CircuitDescription& desc);

/// Bindings applied at elaboration: on/off state per removable element and a
/// value per named parameter. Every removable element and parameter must be
/// bound.
struct ElaborationConfig {
    std::map<std::string, bool> removable_on;
    std::map<std::string, double> parameters;
};

/// Composes the circuit into a single TransferMatrix from the declared modes
/// to the final modes. A removable splitter bound off passes each input
/// straight through to the geometrically crossed output port
/// (out1 <- in2, out2 <- in1). Throws UnboundParameter for missing bindings
/// and ConfigError for bindings that name nothing in the circuit.
TransferMatrix elaborate(const CircuitDescription& desc, const ElaborationConfig& config);

}  // namespace interfero
