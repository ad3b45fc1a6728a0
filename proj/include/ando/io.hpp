#pragma once

#include "ando/pair.hpp"
#include "ando/tuple.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>

namespace ando {

using json = nlohmann::ordered_json;

json matrix_to_json(const CMatrix& A);
// Throws InvalidInput on malformed documents or non-finite entries.
CMatrix matrix_from_json(const json& j);

json read_json_file(const std::filesystem::path& path);

struct PairSpec {
    CMatrix T1, T2;
    Tolerances tol;
};

// T1 / T2 are matrix objects or paths relative to base_dir; "tolerances" may override fields.
PairSpec pair_spec_from_json(const json& j, const std::filesystem::path& base_dir = {});
json pair_spec_to_json(const PairSpec& p);

struct TupleSpec {
    CMatrix Lambda, P, U;
    Orientation orientation = Orientation::Forward;
};

TupleSpec tuple_spec_from_json(const json& j, const std::filesystem::path& base_dir = {});
json tuple_spec_to_json(const PreAndoTuple& t);
// Attaches the defect basis of the pair in the tuple's orientation.
PreAndoTuple to_pre_ando(const TupleSpec& s, const CommutingContractivePair& pair);

std::string fnv1a_hex(const std::string& data);

struct RunReport {
    std::string command;
    std::string inputs_hash;
    std::map<std::string, double> residuals;  // keyed by equation tag
    std::map<std::string, bool> criteria;
    std::map<std::string, double> timings;
    json details = json::object();

    bool pass() const;
    json to_json() const;
};

}  // namespace ando
