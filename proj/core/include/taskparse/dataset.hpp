#pragma once

#include <string>
#include <vector>

#include "taskparse/errors.hpp"

namespace taskparse {

enum class ValueForm { kSurface, kEntity };

struct Example {
    std::string utterance;
    std::string parse;  // linearized, in the form declared by the header
};

// A flat utterance/parse file: a "# values: surface|entity" header line,
// then one tab-separated example per line.
struct Dataset {
    ValueForm form = ValueForm::kSurface;
    std::vector<Example> examples;
};

Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& dataset, const std::string& path);

// Reads one parse per line, for prediction files.  Blank lines are kept as
// empty strings so line numbers stay aligned with the gold file.
std::vector<std::string> load_lines(const std::string& path);
void save_lines(const std::vector<std::string>& lines, const std::string& path);

}  // namespace taskparse
