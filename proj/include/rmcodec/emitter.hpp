#pragma once

#include "rmcodec/logic.hpp"

#include <string>
#include <vector>

namespace rmc::metrics {

struct Listing {
    std::string service;
    std::string operation;
    std::string text;
    int loc = 0; // non-blank lines of the body
};

// Deterministic pseudo-imperative listing per operation: header, find
// statements, a guard conditional, effect statements, failure raise.
// Byte-identical across runs for equal input.
std::string emit_listing(const logic::BusinessLogicUnit& unit);
std::vector<Listing> emit_listings(const logic::ApplicationUnit& app);

int count_loc(const std::string& listing_text);

} // namespace rmc::metrics
