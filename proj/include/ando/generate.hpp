#pragma once

#include "ando/linalg.hpp"

#include <cstdint>
#include <random>
#include <string>

namespace ando {

enum class Family { Polynomial, Block, Unitary, Nilpotent, JointEig };

std::string to_string(Family f);
Family family_from_string(const std::string& s);  // throws InvalidInput

struct GeneratedPair {
    CMatrix T1, T2;
    Family family = Family::Polynomial;
    std::uint64_t seed = 0;
};

GeneratedPair generate_pair(std::uint64_t seed, Index dim, Family family);

// Seeded helpers shared with the tests.
CMatrix random_gaussian(std::mt19937_64& rng, Index rows, Index cols);
CMatrix random_unitary(std::mt19937_64& rng, Index n);

}  // namespace ando
