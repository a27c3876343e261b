#include "interfero/circuit.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace interfero {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

enum class TokKind { ident, number, arrow, semi, end };

struct Token {
    TokKind kind = TokKind::end;
    std::string text;
    double number = 0.0;
    int line = 1;
    int column = 1;
};

class Lexer {
public:
    Lexer(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

    const std::string& source() const { return source_; }

    Token next() {
        skip_ws_and_comments();
        Token tok;
        tok.line = line_;
        tok.column = column_;
        if (pos_ >= text_.size()) {
            tok.kind = TokKind::end;
            tok.text = "<end of input>";
            return tok;
        }
        const char c = text_[pos_];
        if (c == ';') {
            advance();
            tok.kind = TokKind::semi;
            tok.text = ";";
            return tok;
        }
        if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
            advance();
            advance();
            tok.kind = TokKind::arrow;
            tok.text = "->";
            return tok;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                advance();
            }
            tok.kind = TokKind::ident;
            tok.text = std::string(text_.substr(start, pos_ - start));
            return tok;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '+' || c == '-') {
            std::size_t start = pos_;
            const char* begin = text_.data() + start;
            char* parse_end = nullptr;
            const double value = std::strtod(begin, &parse_end);
            if (parse_end == begin) {
                throw SyntaxError(source_, line_, column_,
                                  std::string("unexpected character '") + c + "'");
            }
            const auto len = static_cast<std::size_t>(parse_end - begin);
            for (std::size_t k = 0; k < len; ++k) advance();
            tok.kind = TokKind::number;
            tok.text = std::string(text_.substr(start, len));
            tok.number = value;
            return tok;
        }
        throw SyntaxError(source_, line_, column_, std::string("unexpected character '") + c + "'");
    }

private:
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void skip_ws_and_comments() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    std::string_view text_;
    std::string source_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
};

class Parser {
public:
    Parser(std::string_view text, std::string source_name)
        : lexer_(text, std::move(source_name)) {
        current_ = lexer_.next();
    }

    CircuitDescription parse() {
        desc_.source_name = lexer_.source();
        while (current_.kind != TokKind::end) {
            statement();
        }
        finish();
        return std::move(desc_);
    }

private:
    [[noreturn]] void fail(const Token& at, const std::string& message) {
        throw SyntaxError(lexer_.source(), at.line, at.column,
                          message + ", found '" + at.text + "'");
    }

    [[noreturn]] void semantic(const SourcePos& pos, const std::string& message) {
        throw SemanticError(lexer_.source(), pos.line, pos.column, message);
    }

    Token take() {
        Token t = current_;
        current_ = lexer_.next();
        return t;
    }

    Token expect(TokKind kind, const std::string& what) {
        if (current_.kind != kind) fail(current_, "expected " + what);
        return take();
    }

    std::string expect_ident(const std::string& what) { return expect(TokKind::ident, what).text; }

    void expect_semi() { expect(TokKind::semi, "';'"); }

    SourcePos pos_of(const Token& t) const { return SourcePos{t.line, t.column}; }

    void statement() {
        const Token kw = expect(TokKind::ident, "statement keyword (modes|param|bs|phase|mirror|detect)");
        if (kw.text == "modes") {
            parse_modes(kw);
        } else if (kw.text == "param") {
            parse_param(kw);
        } else if (kw.text == "bs") {
            parse_bs(kw);
        } else if (kw.text == "phase") {
            parse_phase(kw);
        } else if (kw.text == "mirror") {
            parse_mirror(kw);
        } else if (kw.text == "detect") {
            parse_detect(kw);
        } else {
            fail(kw, "expected statement keyword (modes|param|bs|phase|mirror|detect)");
        }
    }

    void parse_modes(const Token& kw) {
        if (modes_seen_) semantic(pos_of(kw), "duplicate 'modes' statement");
        if (!desc_.elements.empty() || !desc_.detectors.empty()) {
            semantic(pos_of(kw), "'modes' must precede all elements");
        }
        modes_seen_ = true;
        while (current_.kind == TokKind::ident) {
            const Token t = take();
            declare_label(t.text, pos_of(t));
            desc_.input_modes.push_back(t.text);
            live_.push_back(t.text);
        }
        if (desc_.input_modes.empty()) fail(current_, "expected mode label");
        expect_semi();
    }

    void parse_param(const Token& kw) {
        const Token name = expect(TokKind::ident, "parameter name");
        if (!params_.insert(name.text).second) {
            semantic(pos_of(name), "duplicate parameter '" + name.text + "'");
        }
        (void)kw;
        desc_.parameters.push_back(name.text);
        expect_semi();
    }

    BsSpecLiteral parse_bs_spec(const std::string& element_name) {
        const Token head = expect(TokKind::ident, "'balanced' or 'coeffs'");
        BsSpecLiteral lit;
        if (head.text == "balanced") {
            lit.balanced = true;
            return lit;
        }
        if (head.text != "coeffs") fail(head, "expected 'balanced' or 'coeffs'");
        lit.balanced = false;
        lit.r_mag = expect(TokKind::number, "reflection magnitude").number;
        lit.t_mag = expect(TokKind::number, "transmission magnitude").number;
        lit.phi_r = expect(TokKind::number, "reflection phase").number;
        lit.phi_t = expect(TokKind::number, "transmission phase").number;
        try {
            lit.resolve();
        } catch (const LosslessViolation& e) {
            semantic(pos_of(head), "bs '" + element_name + "': " + e.what());
        }
        return lit;
    }

    void parse_bs(const Token& kw) {
        BeamSplitterElement el;
        el.pos = pos_of(kw);
        el.name = expect_ident("element name");
        register_element_name(el.name, el.pos);
        el.spec = parse_bs_spec(el.name);
        const Token in1 = expect(TokKind::ident, "input mode");
        const Token in2 = expect(TokKind::ident, "input mode");
        if (in1.text == in2.text) semantic(pos_of(in2), "bs inputs must be distinct modes");
        expect(TokKind::arrow, "'->'");
        const Token out1 = expect(TokKind::ident, "output mode");
        const Token out2 = expect(TokKind::ident, "output mode");
        if (current_.kind == TokKind::ident && current_.text == "removable") {
            take();
            el.removable = true;
        }
        expect_semi();
        consume_mode(in1.text, pos_of(in1));
        consume_mode(in2.text, pos_of(in2));
        produce_mode(in1.text, out1.text, pos_of(out1));
        produce_mode(in2.text, out2.text, pos_of(out2));
        el.inputs = {in1.text, in2.text};
        el.outputs = {out1.text, out2.text};
        desc_.elements.push_back(std::move(el));
    }

    void parse_phase(const Token& kw) {
        PhaseElement el;
        el.pos = pos_of(kw);
        el.name = expect_ident("element name");
        register_element_name(el.name, el.pos);
        const Token mode = expect(TokKind::ident, "mode label");
        require_live(mode.text, pos_of(mode));
        el.mode = mode.text;
        if (current_.kind == TokKind::number) {
            el.value.is_parameter = false;
            el.value.literal = take().number;
        } else if (current_.kind == TokKind::ident) {
            const Token p = take();
            if (!params_.count(p.text)) {
                semantic(pos_of(p), "undeclared parameter '" + p.text + "'");
            }
            el.value.is_parameter = true;
            el.value.parameter = p.text;
        } else {
            fail(current_, "expected phase value (radians or parameter name)");
        }
        expect_semi();
        desc_.elements.push_back(std::move(el));
    }

    void parse_mirror(const Token& kw) {
        MirrorElement el;
        el.pos = pos_of(kw);
        el.name = expect_ident("element name");
        register_element_name(el.name, el.pos);
        const Token in = expect(TokKind::ident, "input mode");
        expect(TokKind::arrow, "'->'");
        const Token out = expect(TokKind::ident, "output mode");
        expect_semi();
        consume_mode(in.text, pos_of(in));
        produce_mode(in.text, out.text, pos_of(out));
        el.input = in.text;
        el.output = out.text;
        desc_.elements.push_back(std::move(el));
    }

    void parse_detect(const Token& kw) {
        DetectorBinding b;
        b.pos = pos_of(kw);
        b.detector = expect_ident("detector name");
        b.mode = expect_ident("mode label");
        expect_semi();
        desc_.detectors.push_back(std::move(b));
    }

    void declare_label(const std::string& label, const SourcePos& pos) {
        if (!all_labels_.insert(label).second) {
            semantic(pos, "mode label '" + label + "' reused");
        }
    }

    void require_live(const std::string& label, const SourcePos& pos) {
        if (std::find(live_.begin(), live_.end(), label) == live_.end()) {
            if (all_labels_.count(label)) {
                semantic(pos, "mode '" + label + "' already consumed");
            }
            semantic(pos, "undeclared mode '" + label + "'");
        }
    }

    void consume_mode(const std::string& label, const SourcePos& pos) {
        require_live(label, pos);
    }

    // Replaces `from` with `to` in the live list, keeping its position.
    void produce_mode(const std::string& from, const std::string& to, const SourcePos& pos) {
        declare_label(to, pos);
        *std::find(live_.begin(), live_.end(), from) = to;
    }

    void register_element_name(const std::string& name, const SourcePos& pos) {
        if (!element_names_.insert(name).second) {
            semantic(pos, "duplicate element name '" + name + "'");
        }
    }

    void finish() {
        if (!modes_seen_) {
            throw SemanticError(lexer_.source(), 1, 1, "circuit declares no modes");
        }
        std::unordered_set<std::string> detector_names;
        std::unordered_set<std::string> detected_modes;
        for (const auto& b : desc_.detectors) {
            if (!detector_names.insert(b.detector).second) {
                semantic(b.pos, "duplicate detector '" + b.detector + "'");
            }
            if (std::find(live_.begin(), live_.end(), b.mode) == live_.end()) {
                if (all_labels_.count(b.mode)) {
                    semantic(b.pos, "detector '" + b.detector + "' bound to non-final mode '" +
                                        b.mode + "'");
                }
                semantic(b.pos, "detector '" + b.detector + "' bound to undeclared mode '" +
                                    b.mode + "'");
            }
            if (!detected_modes.insert(b.mode).second) {
                semantic(b.pos, "mode '" + b.mode + "' detected twice");
            }
        }
    }

    Lexer lexer_;
    Token current_;
    CircuitDescription desc_;
    bool modes_seen_ = false;
    std::vector<std::string> live_;
    std::unordered_set<std::string> all_labels_;
    std::unordered_set<std::string> params_;
    std::unordered_set<std::string> element_names_;
};

}  // namespace

BeamSplitterSpec BsSpecLiteral::resolve() const {
    if (balanced) return balanced_beam_splitter();
    return make_beam_splitter(r_mag, t_mag, phi_r, phi_t);
}

bool BsSpecLiteral::operator==(const BsSpecLiteral& other) const {
    if (balanced != other.balanced) return false;
    if (balanced) return true;
    return r_mag == other.r_mag && t_mag == other.t_mag && phi_r == other.phi_r &&
           phi_t == other.phi_t;
}

bool PhaseValue::operator==(const PhaseValue& other) const {
    if (is_parameter != other.is_parameter) return false;
    return is_parameter ? parameter == other.parameter : literal == other.literal;
}

namespace {

bool elements_equal(const Element& a, const Element& b) {
    if (a.index() != b.index()) return false;
    if (const auto* bs = std::get_if<BeamSplitterElement>(&a)) {
        const auto& o = std::get<BeamSplitterElement>(b);
        return bs->name == o.name && bs->spec == o.spec && bs->inputs == o.inputs &&
               bs->outputs == o.outputs && bs->removable == o.removable;
    }
    if (const auto* ph = std::get_if<PhaseElement>(&a)) {
        const auto& o = std::get<PhaseElement>(b);
        return ph->name == o.name && ph->mode == o.mode && ph->value == o.value;
    }
    const auto& mi = std::get<MirrorElement>(a);
    const auto& o = std::get<MirrorElement>(b);
    return mi.name == o.name && mi.input == o.input && mi.output == o.output;
}

}  // namespace

std::vector<std::string> CircuitDescription::removable_names() const {
    std::vector<std::string> names;
    for (const auto& el : elements) {
        if (const auto* bs = std::get_if<BeamSplitterElement>(&el)) {
            if (bs->removable) names.push_back(bs->name);
        }
    }
    return names;
}

std::vector<std::string> CircuitDescription::final_modes() const {
    std::vector<std::string> live = input_modes;
    for (const auto& el : elements) {
        if (const auto* bs = std::get_if<BeamSplitterElement>(&el)) {
            *std::find(live.begin(), live.end(), bs->inputs[0]) = bs->outputs[0];
            *std::find(live.begin(), live.end(), bs->inputs[1]) = bs->outputs[1];
        } else if (const auto* mi = std::get_if<MirrorElement>(&el)) {
            *std::find(live.begin(), live.end(), mi->input) = mi->output;
        }
    }
    return live;
}

bool CircuitDescription::operator==(const CircuitDescription& other) const {
    if (input_modes != other.input_modes || parameters != other.parameters) return false;
    if (elements.size() != other.elements.size()) return false;
    for (std::size_t i = 0; i < elements.size(); ++i) {
        if (!elements_equal(elements[i], other.elements[i])) return false;
    }
    if (detectors.size() != other.detectors.size()) return false;
    for (std::size_t i = 0; i < detectors.size(); ++i) {
        if (detectors[i].detector != other.detectors[i].detector ||
            detectors[i].mode != other.detectors[i].mode) {
            return false;
        }
    }
    return true;
}

CircuitDescription parse_circuit(std::string_view text, std::string source_name) {
    // Own a NUL-terminated copy: number scanning relies on strtod.
    const std::string owned(text);
    Parser parser(owned, std::move(source_name));
    return parser.parse();
}

std::string pretty_print(const CircuitDescription& desc) {
    std::ostringstream os;
    os << "modes";
    for (const auto& m : desc.input_modes) os << " " << m;
    os << ";\n";
    for (const auto& p : desc.parameters) os << "param " << p << ";\n";
    for (const auto& el : desc.elements) {
        if (const auto* bs = std::get_if<BeamSplitterElement>(&el)) {
            os << "bs " << bs->name << " ";
            if (bs->spec.balanced) {
                os << "balanced";
            } else {
                os << "coeffs " << fmt_double(bs->spec.r_mag) << " " << fmt_double(bs->spec.t_mag)
                   << " " << fmt_double(bs->spec.phi_r) << " " << fmt_double(bs->spec.phi_t);
            }
            os << " " << bs->inputs[0] << " " << bs->inputs[1] << " -> " << bs->outputs[0] << " "
               << bs->outputs[1];
            if (bs->removable) os << " removable";
            os << ";\n";
        } else if (const auto* ph = std::get_if<PhaseElement>(&el)) {
            os << "phase " << ph->name << " " << ph->mode << " ";
            if (ph->value.is_parameter) {
                os << ph->value.parameter;
            } else {
                os << fmt_double(ph->value.literal);
            }
            os << ";\n";
        } else {
            const auto& mi = std::get<MirrorElement>(el);
            os << "mirror " << mi.name << " " << mi.input << " -> " << mi.output << ";\n";
        }
    }
    for (const auto& d : desc.detectors) os << "detect " << d.detector << " " << d.mode << ";\n";
    return os.str();
}

TransferMatrix elaborate(const CircuitDescription& desc, const ElaborationConfig& config) {
    // Bindings must cover the circuit exactly.
    const auto removables = desc.removable_names();
    for (const auto& name : removables) {
        if (!config.removable_on.count(name)) {
            throw UnboundParameter("removable element '" + name + "' has no on/off binding");
        }
    }
    for (const auto& [name, _] : config.removable_on) {
        if (std::find(removables.begin(), removables.end(), name) == removables.end()) {
            throw ConfigError("binding for unknown removable element '" + name + "'");
        }
    }
    for (const auto& p : desc.parameters) {
        if (!config.parameters.count(p)) {
            throw UnboundParameter("parameter '" + p + "' is unbound");
        }
    }
    for (const auto& [name, _] : config.parameters) {
        if (std::find(desc.parameters.begin(), desc.parameters.end(), name) ==
            desc.parameters.end()) {
            throw ConfigError("binding for unknown parameter '" + name + "'");
        }
    }

    std::vector<std::string> live = desc.input_modes;
    const auto dim = static_cast<Eigen::Index>(live.size());
    TransferMatrix acc = TransferMatrix::identity(live);

    auto position = [&](const std::string& label) {
        return static_cast<Eigen::Index>(
            std::distance(live.begin(), std::find(live.begin(), live.end(), label)));
    };

    for (const auto& el : desc.elements) {
        if (const auto* bs = std::get_if<BeamSplitterElement>(&el)) {
            const Eigen::Index i = position(bs->inputs[0]);
            const Eigen::Index j = position(bs->inputs[1]);
            Eigen::MatrixXcd step = Eigen::MatrixXcd::Identity(dim, dim);
            const bool on = !bs->removable || config.removable_on.at(bs->name);
            if (on) {
                const BeamSplitterSpec spec = bs->spec.resolve();
                step(i, i) = spec.reflection();
                step(i, j) = spec.transmission();
                step(j, i) = spec.transmission();
                step(j, j) = spec.reflection();
            } else {
                // Off: straight-line propagation crosses the splitter position,
                // so each input continues into the opposite output port.
                step(i, i) = 0.0;
                step(j, j) = 0.0;
                step(i, j) = 1.0;
                step(j, i) = 1.0;
            }
            std::vector<std::string> next = live;
            next[static_cast<std::size_t>(i)] = bs->outputs[0];
            next[static_cast<std::size_t>(j)] = bs->outputs[1];
            acc = compose(TransferMatrix(std::move(step), live, next), acc);
            live = std::move(next);
        } else if (const auto* ph = std::get_if<PhaseElement>(&el)) {
            const double value =
                ph->value.is_parameter ? config.parameters.at(ph->value.parameter)
                                       : ph->value.literal;
            Eigen::MatrixXcd step = Eigen::MatrixXcd::Identity(dim, dim);
            step(position(ph->mode), position(ph->mode)) = std::polar(1.0, value);
            acc = compose(TransferMatrix(std::move(step), live, live), acc);
        } else {
            const auto& mi = std::get<MirrorElement>(el);
            const Eigen::Index i = position(mi.input);
            std::vector<std::string> next = live;
            next[static_cast<std::size_t>(i)] = mi.output;
            acc = compose(TransferMatrix(Eigen::MatrixXcd::Identity(dim, dim), live, next), acc);
            live = std::move(next);
        }
    }
    return acc;
}

}  // namespace interfero
