#include "ando/io.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace ando {

json matrix_to_json(const CMatrix& A) {
    json e = json::array();
    for (Index i = 0; i < A.rows(); ++i)
        for (Index j = 0; j < A.cols(); ++j) e.push_back({A(i, j).real(), A(i, j).imag()});
    return json{{"rows", A.rows()}, {"cols", A.cols()}, {"entries", e}};
}

CMatrix matrix_from_json(const json& j) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("entries"))
        throw Error(ErrorKind::InvalidInput, "matrix needs rows, cols and entries");
    if (!j["rows"].is_number_integer() || !j["cols"].is_number_integer() || !j["entries"].is_array())
        throw Error(ErrorKind::InvalidInput, "rows/cols must be integers and entries an array");
    const long long r = j["rows"].get<long long>(), c = j["cols"].get<long long>();
    if (r < 0 || c < 0) throw Error(ErrorKind::InvalidInput, "negative matrix dimensions");
    const json& e = j["entries"];
    if (static_cast<long long>(e.size()) != r * c) {
        std::ostringstream os;
        os << "expected " << r * c << " entries, found " << e.size();
        throw Error(ErrorKind::InvalidInput, os.str());
    }
    CMatrix A(r, c);
    for (long long k = 0; k < r * c; ++k) {
        const json& z = e[static_cast<size_t>(k)];
        double re = 0, im = 0;
        if (z.is_number()) {
            re = z.get<double>();
        } else if (z.is_array() && z.size() == 2 && z[0].is_number() && z[1].is_number()) {
            re = z[0].get<double>();
            im = z[1].get<double>();
        } else {
            throw Error(ErrorKind::InvalidInput, "entries must be [re, im] pairs");
        }
        if (!std::isfinite(re) || !std::isfinite(im)) throw Error(ErrorKind::InvalidInput, "non-finite entry");
        A(k / c, k % c) = cd(re, im);
    }
    return A;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidInput, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::InvalidInput, path.string() + ": " + e.what());
    }
}

namespace {

CMatrix matrix_ref(const json& j, const std::filesystem::path& base) {
    if (j.is_string()) {
        std::filesystem::path p = j.get<std::string>();
        if (p.is_relative() && !base.empty()) p = base / p;
        return matrix_from_json(read_json_file(p));
    }
    return matrix_from_json(j);
}

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::InvalidInput, std::string("missing field '") + key + "'");
    return j[key];
}

}  // namespace

PairSpec pair_spec_from_json(const json& j, const std::filesystem::path& base_dir) {
    PairSpec p;
    p.T1 = matrix_ref(field(j, "T1"), base_dir);
    p.T2 = matrix_ref(field(j, "T2"), base_dir);
    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        for (auto [key, dst] : {std::pair{"rank_tol", &p.tol.rank_tol}, std::pair{"eq_tol", &p.tol.eq_tol},
                                std::pair{"conv_tol", &p.tol.conv_tol}, std::pair{"psd_tol", &p.tol.psd_tol}}) {
            if (!t.contains(key)) continue;
            if (!t[key].is_number()) throw Error(ErrorKind::InvalidInput, std::string(key) + " must be a number");
            *dst = t[key].get<double>();
        }
        p.tol.validate();
    }
    return p;
}

json pair_spec_to_json(const PairSpec& p) {
    return json{{"T1", matrix_to_json(p.T1)},
                {"T2", matrix_to_json(p.T2)},
                {"tolerances",
                 {{"rank_tol", p.tol.rank_tol}, {"eq_tol", p.tol.eq_tol}, {"conv_tol", p.tol.conv_tol},
                  {"psd_tol", p.tol.psd_tol}}}};
}

TupleSpec tuple_spec_from_json(const json& j, const std::filesystem::path& base_dir) {
    TupleSpec s;
    s.Lambda = matrix_ref(field(j, "Lambda"), base_dir);
    s.P = matrix_ref(field(j, "P"), base_dir);
    s.U = matrix_ref(field(j, "U"), base_dir);
    if (j.contains("orientation")) {
        std::string o = j["orientation"].get<std::string>();
        if (o == "forward") s.orientation = Orientation::Forward;
        else if (o == "adjoint") s.orientation = Orientation::Adjoint;
        else throw Error(ErrorKind::InvalidInput, "orientation must be forward or adjoint");
    }
    const Index F = s.P.rows();
    if (s.P.cols() != F || s.U.rows() != F || s.U.cols() != F || s.Lambda.rows() != F)
        throw Error(ErrorKind::InvalidInput, "Lambda, P, U must share the coefficient dimension");
    return s;
}

json tuple_spec_to_json(const PreAndoTuple& t) {
    return json{{"Lambda", matrix_to_json(t.Lambda)},
                {"P", matrix_to_json(t.P)},
                {"U", matrix_to_json(t.U)},
                {"orientation", to_string(t.orientation)}};
}

PreAndoTuple to_pre_ando(const TupleSpec& s, const CommutingContractivePair& pair) {
    CMatrix S = s.orientation == Orientation::Forward ? CMatrix(pair.T1 * pair.T2)
                                                      : CMatrix(pair.T1.adjoint() * pair.T2.adjoint());
    Defect d = defect(S, pair.tol);
    if (s.Lambda.cols() != d.dim()) {
        std::ostringstream os;
        os << "Lambda has " << s.Lambda.cols() << " columns, the defect space has dimension " << d.dim();
        throw Error(ErrorKind::OrientationMismatch, os.str());
    }
    PreAndoTuple t;
    t.F_dim = s.P.rows();
    t.Lambda = s.Lambda;
    t.P = s.P;
    t.U = s.U;
    t.orientation = s.orientation;
    t.D_basis = d.E();
    return t;
}

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

bool RunReport::pass() const {
    for (const auto& [k, v] : criteria)
        if (!v) return false;
    return true;
}

json RunReport::to_json() const {
    json j;
    j["command"] = command;
    j["inputs_hash"] = inputs_hash;
    json r = json::object();
    for (const auto& [k, v] : residuals) r[k] = v;
    j["residuals"] = r;
    json c = json::object();
    for (const auto& [k, v] : criteria) c[k] = v;
    j["criteria"] = c;
    j["pass"] = pass();
    if (!details.empty()) j["details"] = details;
    json t = json::object();
    for (const auto& [k, v] : timings) t[k] = v;
    j["timings"] = t;
    return j;
}

}  // namespace ando
