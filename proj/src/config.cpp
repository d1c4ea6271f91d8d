#include "fractube/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <variant>

namespace fractube {

namespace {

// ---- expressions ----------------------------------------------------------

class ExpressionParser {
public:
    explicit ExpressionParser(std::string_view s) : s_(s) {}

    double parse() {
        const double v = sum();
        skip();
        if (pos_ != s_.size()) fail("unexpected character");
        return v;
    }

    std::size_t position() const { return pos_; }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("column " + std::to_string(pos_ + 1) + ": " + what);
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    double sum() {
        double v = product();
        for (;;) {
            if (eat('+')) v += product();
            else if (eat('-')) v -= product();
            else return v;
        }
    }
    double product() {
        double v = unary();
        for (;;) {
            if (eat('*')) v *= unary();
            else if (eat('/')) v /= unary();
            else return v;
        }
    }
    double unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }
    double power() {
        const double base = atom();
        if (eat('^')) return std::pow(base, unary());  // right associative
        return base;
    }
    double atom() {
        skip();
        if (eat('(')) {
            const double v = sum();
            if (!eat(')')) fail("expected ')'");
            return v;
        }
        if (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) {
            const std::string rest(s_.substr(pos_));
            char* end = nullptr;
            const double v = std::strtod(rest.c_str(), &end);
            if (end == rest.c_str()) fail("bad number");
            pos_ += static_cast<std::size_t>(end - rest.c_str());
            return v;
        }
        std::string name;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            name += s_[pos_++];
        if (name.empty()) fail("expected a number, name or '('");
        if (name == "pi") return kPi;
        if (name == "e") return std::numbers::e;
        if (!eat('(')) fail("unknown constant '" + name + "'");
        const double a = sum();
        double b = 0.0;
        const bool two = name == "atan2";
        if (two) {
            if (!eat(',')) fail("expected ','");
            b = sum();
        }
        if (!eat(')')) fail("expected ')'");
        if (name == "sqrt") return std::sqrt(a);
        if (name == "log") return std::log(a);
        if (name == "exp") return std::exp(a);
        if (name == "sin") return std::sin(a);
        if (name == "cos") return std::cos(a);
        if (name == "tan") return std::tan(a);
        if (two) return std::atan2(a, b);
        fail("unknown function '" + name + "'");
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

// ---- TOML subset -------------------------------------------------------------

struct Value;
using Array = std::vector<Value>;
struct Value {
    std::variant<double, bool, std::string, Array> data;
    bool integer = false;
    int line = 0, column = 0;
};

struct Entry {
    Value value;
    int line = 0, column = 0;
};
using Table = std::map<std::string, Entry>;

struct Document {
    Table root;
    std::map<std::string, Table> tables;
    std::vector<Table> map_tables;
};

class TomlReader {
public:
    TomlReader(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

    Document read() {
        Document doc;
        Table* current = &doc.root;
        std::set<std::string> seen_tables;
        std::size_t start = 0;
        while (start <= text_.size()) {
            const std::size_t end = std::min(text_.find('\n', start), text_.size());
            line_ = std::string(text_.substr(start, end - start));
            if (!line_.empty() && line_.back() == '\r') line_.pop_back();
            ++line_no_;
            pos_ = 0;
            skip();
            if (pos_ < line_.size() && line_[pos_] != '#') {
                if (line_[pos_] == '[') {
                    const bool array = line_.compare(pos_, 2, "[[") == 0;
                    pos_ += array ? 2 : 1;
                    const std::string name = bare_key();
                    if (!expect(array ? "]]" : "]")) fail("expected closing bracket");
                    trailing();
                    if (array) {
                        if (name != "map") fail("unknown array table [[" + name + "]]");
                        doc.map_tables.emplace_back();
                        current = &doc.map_tables.back();
                    } else {
                        if (name != "window" && name != "evaluation") fail("unknown table [" + name + "]");
                        if (!seen_tables.insert(name).second) fail("duplicate table [" + name + "]");
                        current = &doc.tables[name];
                    }
                } else {
                    const int key_col = static_cast<int>(pos_) + 1;
                    const std::string key = bare_key();
                    skip();
                    if (!expect("=")) fail("expected '='");
                    Value v = value();
                    trailing();
                    if (current->count(key)) fail("duplicate key '" + key + "'", key_col);
                    (*current)[key] = Entry{std::move(v), line_no_, key_col};
                }
            }
            if (end == text_.size()) break;
            start = end + 1;
        }
        return doc;
    }

private:
    [[noreturn]] void fail(const std::string& what, int column = 0) const {
        const int col = column > 0 ? column : static_cast<int>(pos_) + 1;
        throw ConfigError(source_ + ":" + std::to_string(line_no_) + ":" + std::to_string(col) + ": " + what);
    }
    void skip() {
        while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t')) ++pos_;
    }
    bool expect(std::string_view token) {
        skip();
        if (line_.compare(pos_, token.size(), token) == 0) {
            pos_ += token.size();
            return true;
        }
        return false;
    }
    void trailing() {
        skip();
        if (pos_ < line_.size() && line_[pos_] != '#') fail("unexpected trailing characters");
    }
    std::string bare_key() {
        skip();
        std::string key;
        while (pos_ < line_.size() &&
               (std::isalnum(static_cast<unsigned char>(line_[pos_])) || line_[pos_] == '_' || line_[pos_] == '-'))
            key += line_[pos_++];
        if (key.empty()) fail("expected a key");
        return key;
    }
    Value value() {
        skip();
        Value v;
        v.line = line_no_;
        v.column = static_cast<int>(pos_) + 1;
        if (pos_ >= line_.size()) fail("missing value");
        const char c = line_[pos_];
        if (c == '"') {
            ++pos_;
            std::string s;
            while (pos_ < line_.size() && line_[pos_] != '"') {
                if (line_[pos_] == '\\') fail("escape sequences are not supported");
                s += line_[pos_++];
            }
            if (pos_ >= line_.size()) fail("unterminated string");
            ++pos_;
            v.data = s;
        } else if (c == '[') {
            ++pos_;
            Array items;
            skip();
            if (pos_ < line_.size() && line_[pos_] == ']') {
                ++pos_;
            } else {
                for (;;) {
                    items.push_back(value());
                    skip();
                    if (expect(",")) {
                        skip();
                        if (pos_ < line_.size() && line_[pos_] == ']') {
                            ++pos_;
                            break;
                        }
                        continue;
                    }
                    if (expect("]")) break;
                    fail("expected ',' or ']'");
                }
            }
            v.data = std::move(items);
        } else if (line_.compare(pos_, 4, "true") == 0) {
            pos_ += 4;
            v.data = true;
        } else if (line_.compare(pos_, 5, "false") == 0) {
            pos_ += 5;
            v.data = false;
        } else {
            std::size_t end = pos_;
            while (end < line_.size() && (std::isalnum(static_cast<unsigned char>(line_[end])) ||
                                          std::string_view("+-._").find(line_[end]) != std::string_view::npos))
                ++end;
            std::string token = line_.substr(pos_, end - pos_);
            std::erase(token, '_');
            char* stop = nullptr;
            const double d = std::strtod(token.c_str(), &stop);
            if (token.empty() || *stop != '\0' || !std::isfinite(d)) fail("invalid value");
            v.integer = token.find_first_of(".eE") == std::string::npos;
            v.data = d;
            pos_ = end;
        }
        return v;
    }

    std::string_view text_;
    std::string source_;
    std::string line_;
    std::size_t pos_ = 0;
    int line_no_ = 0;
};

// ---- schema ------------------------------------------------------------------

class Schema {
public:
    explicit Schema(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const Value& v, const std::string& what) const {
        throw ConfigError(source_ + ":" + std::to_string(v.line) + ":" + std::to_string(v.column) + ": " + what);
    }

    double number(const Value& v, const std::string& key) const {
        if (auto d = std::get_if<double>(&v.data)) return *d;
        if (auto s = std::get_if<std::string>(&v.data)) {
            try {
                const double x = evaluate_expression(*s);
                if (!std::isfinite(x)) fail(v, "'" + key + "' evaluates to a non-finite number");
                return x;
            } catch (const ConfigError& e) {
                fail(v, "'" + key + "': " + e.what());
            }
        }
        fail(v, "'" + key + "' must be a number or a quoted expression");
    }
    long integer(const Value& v, const std::string& key) const {
        const auto d = std::get_if<double>(&v.data);
        if (!d || !v.integer) fail(v, "'" + key + "' must be an integer");
        return static_cast<long>(*d);
    }
    bool boolean(const Value& v, const std::string& key) const {
        if (auto b = std::get_if<bool>(&v.data)) return *b;
        fail(v, "'" + key + "' must be true or false");
    }
    std::string string(const Value& v, const std::string& key) const {
        if (auto s = std::get_if<std::string>(&v.data)) return *s;
        fail(v, "'" + key + "' must be a string");
    }
    std::vector<double> numbers(const Value& v, const std::string& key) const {
        const auto a = std::get_if<Array>(&v.data);
        if (!a) fail(v, "'" + key + "' must be an array");
        std::vector<double> out;
        for (const auto& item : *a) out.push_back(number(item, key));
        return out;
    }
    void reject_unknown(const Table& t, std::initializer_list<std::string_view> allowed, const std::string& where) const {
        for (const auto& [key, entry] : t) {
            bool ok = false;
            for (auto a : allowed) ok = ok || key == a;
            if (!ok)
                throw ConfigError(source_ + ":" + std::to_string(entry.line) + ":" + std::to_string(entry.column) +
                                  ": unknown key '" + key + "' in " + where);
        }
    }

private:
    std::string source_;
};

std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    std::string s = buf;
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

}  // namespace

double evaluate_expression(std::string_view text) { return ExpressionParser(text).parse(); }

SystemConfig parse_config(std::string_view text, const std::string& source) {
    const Document doc = TomlReader(text, source).read();
    const Schema schema(source);
    SystemConfig cfg;

    schema.reject_unknown(doc.root, {"label", "dimension", "koch_xi"}, "the top level");
    if (auto it = doc.root.find("label"); it != doc.root.end()) cfg.label = schema.string(it->second.value, "label");
    auto dim = doc.root.find("dimension");
    if (dim == doc.root.end()) throw ConfigError(source + ":1:1: missing required key 'dimension'");
    cfg.dimension = static_cast<int>(schema.integer(dim->second.value, "dimension"));
    if (cfg.dimension != 1 && cfg.dimension != 2) schema.fail(dim->second.value, "dimension must be 1 or 2");

    if (auto it = doc.root.find("koch_xi"); it != doc.root.end()) {
        const auto xy = schema.numbers(it->second.value, "koch_xi");
        if (xy.size() != 2) schema.fail(it->second.value, "koch_xi must be [re, im]");
        const cplx xi(xy[0], xy[1]);
        if (!(std::norm(xi) + std::norm(1.0 - xi) < 1.0))
            schema.fail(it->second.value, "koch_xi must satisfy |xi|^2 + |1 - xi|^2 < 1");
        if (cfg.dimension != 2) schema.fail(it->second.value, "koch_xi needs dimension = 2");
        if (!doc.map_tables.empty())
            schema.fail(it->second.value, "koch_xi and [[map]] entries are mutually exclusive");
        cfg.koch_xi = xi;
    } else if (doc.map_tables.empty()) {
        throw ConfigError(source + ":1:1: at least one [[map]] (or koch_xi) is required");
    }

    for (const auto& t : doc.map_tables) {
        schema.reject_unknown(t, {"ratio", "rotation_deg", "reflect", "translation"}, "[[map]]");
        MapConfig m;
        auto ratio = t.find("ratio");
        auto trans = t.find("translation");
        if (ratio == t.end() || trans == t.end())
            throw ConfigError(source + ": every [[map]] needs 'ratio' and 'translation'");
        m.ratio = schema.number(ratio->second.value, "ratio");
        if (!(m.ratio > 0.0 && m.ratio < 1.0)) schema.fail(ratio->second.value, "ratio must lie in (0, 1)");
        m.translation = schema.numbers(trans->second.value, "translation");
        if (static_cast<int>(m.translation.size()) != cfg.dimension)
            schema.fail(trans->second.value, "translation needs one entry per coordinate");
        if (auto it = t.find("rotation_deg"); it != t.end()) {
            m.rotation_deg = schema.number(it->second.value, "rotation_deg");
            if (cfg.dimension == 1 && m.rotation_deg != 0.0 && m.rotation_deg != 180.0)
                schema.fail(it->second.value, "one-dimensional maps allow rotation_deg 0 or 180 only");
        }
        if (auto it = t.find("reflect"); it != t.end()) m.reflect = schema.boolean(it->second.value, "reflect");
        cfg.maps.push_back(m);
    }

    if (auto it = doc.tables.find("window"); it != doc.tables.end()) {
        const Table& t = it->second;
        schema.reject_unknown(t, {"sigma_min", "t_max"}, "[window]");
        if (auto e = t.find("sigma_min"); e != t.end()) cfg.window.sigma_min = schema.number(e->second.value, "sigma_min");
        if (auto e = t.find("t_max"); e != t.end()) {
            cfg.window.t_max = schema.number(e->second.value, "t_max");
            if (!(*cfg.window.t_max > 0.0)) schema.fail(e->second.value, "t_max must be positive");
        }
    }
    if (auto it = doc.tables.find("evaluation"); it != doc.tables.end()) {
        const Table& t = it->second;
        schema.reject_unknown(t,
                              {"n_max", "eps_min", "eps_max", "grid_points", "raster_cells", "depth", "tolerance",
                               "raster_tolerance"},
                              "[evaluation]");
        auto& ev = cfg.evaluation;
        auto positive_int = [&](const char* key, auto& field, long lo) {
            if (auto e = t.find(key); e != t.end()) {
                const long v = schema.integer(e->second.value, key);
                if (v < lo) schema.fail(e->second.value, std::string(key) + " must be at least " + std::to_string(lo));
                field = static_cast<std::remove_reference_t<decltype(field)>>(v);
            }
        };
        positive_int("n_max", ev.n_max, 0);
        positive_int("grid_points", ev.grid_points, 1);
        positive_int("raster_cells", ev.raster_cells, 16);
        positive_int("depth", ev.depth, 0);
        auto positive = [&](const char* key) -> std::optional<double> {
            auto e = t.find(key);
            if (e == t.end()) return std::nullopt;
            const double v = schema.number(e->second.value, key);
            if (!(v > 0.0)) schema.fail(e->second.value, std::string(key) + " must be positive");
            return v;
        };
        ev.eps_min = positive("eps_min");
        ev.eps_max = positive("eps_max");
        if (auto v = positive("tolerance")) ev.tolerance = *v;
        if (auto v = positive("raster_tolerance")) ev.raster_tolerance = *v;
        if (ev.eps_min && ev.eps_max && *ev.eps_min > *ev.eps_max)
            throw ConfigError(source + ": eps_min exceeds eps_max");
    }
    return cfg;
}

SystemConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

std::string serialize_config(const SystemConfig& cfg) {
    std::ostringstream out;
    if (!cfg.label.empty()) out << "label = \"" << cfg.label << "\"\n";
    out << "dimension = " << cfg.dimension << "\n";
    if (cfg.koch_xi)
        out << "koch_xi = [" << format_number(cfg.koch_xi->real()) << ", " << format_number(cfg.koch_xi->imag()) << "]\n";
    for (const auto& m : cfg.maps) {
        out << "\n[[map]]\nratio = " << format_number(m.ratio) << "\n";
        if (m.rotation_deg != 0.0) out << "rotation_deg = " << format_number(m.rotation_deg) << "\n";
        if (m.reflect) out << "reflect = true\n";
        out << "translation = [";
        for (std::size_t i = 0; i < m.translation.size(); ++i)
            out << (i ? ", " : "") << format_number(m.translation[i]);
        out << "]\n";
    }
    if (cfg.window.sigma_min || cfg.window.t_max) {
        out << "\n[window]\n";
        if (cfg.window.sigma_min) out << "sigma_min = " << format_number(*cfg.window.sigma_min) << "\n";
        if (cfg.window.t_max) out << "t_max = " << format_number(*cfg.window.t_max) << "\n";
    }
    const auto& ev = cfg.evaluation;
    out << "\n[evaluation]\n";
    out << "n_max = " << ev.n_max << "\n";
    if (ev.eps_min) out << "eps_min = " << format_number(*ev.eps_min) << "\n";
    if (ev.eps_max) out << "eps_max = " << format_number(*ev.eps_max) << "\n";
    out << "grid_points = " << ev.grid_points << "\n";
    out << "raster_cells = " << ev.raster_cells << "\n";
    out << "depth = " << ev.depth << "\n";
    out << "tolerance = " << format_number(ev.tolerance) << "\n";
    out << "raster_tolerance = " << format_number(ev.raster_tolerance) << "\n";
    return out.str();
}

SelfSimilarSystem SystemConfig::system() const {
    std::vector<Similitude> maps;
    if (koch_xi) {
        const cplx xi = *koch_xi, rest = 1.0 - xi;
        maps.push_back({std::abs(xi), std::arg(xi), true, {0.0, 0.0}});
        maps.push_back({std::abs(rest), std::arg(rest), true, {xi.real(), xi.imag()}});
        return SelfSimilarSystem(2, maps);
    }
    for (const auto& m : this->maps) {
        // On the line a reflection is the half-turn x -> -x.
        double rotation = m.rotation_deg * kPi / 180.0;
        bool reflect = m.reflect;
        if (dimension == 1 && reflect) {
            rotation += kPi;
            reflect = false;
        }
        const Vec2 t{m.translation.at(0), dimension == 2 ? m.translation.at(1) : 0.0};
        maps.push_back({m.ratio, rotation, reflect, t});
    }
    return SelfSimilarSystem(dimension, maps);
}

Window SystemConfig::spectral_window() const {
    Window w;
    if (window.sigma_min) w.sigma_min = *window.sigma_min;
    if (window.t_max) w.t_max = *window.t_max;
    return w;
}

}  // namespace fractube
