#include "taskparse/dataset.hpp"

#include <fstream>
#include <sstream>

namespace taskparse {

namespace {

constexpr const char* kSurfaceHeader = "# values: surface";
constexpr const char* kEntityHeader = "# values: entity";

}  // namespace

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);

    Dataset dataset;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header_seen) {
            if (line == kSurfaceHeader) {
                dataset.form = ValueForm::kSurface;
            } else if (line == kEntityHeader) {
                dataset.form = ValueForm::kEntity;
            } else {
                throw Error(path + ":" + std::to_string(lineno) +
                            ": expected \"# values: surface|entity\" header");
            }
            header_seen = true;
            continue;
        }
        if (line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw Error(path + ":" + std::to_string(lineno) +
                        ": expected utterance<TAB>parse");
        }
        dataset.examples.push_back(
            Example{line.substr(0, tab), line.substr(tab + 1)});
    }
    if (!header_seen) throw Error(path + ": empty dataset file");
    return dataset;
}

void save_dataset(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << (dataset.form == ValueForm::kSurface ? kSurfaceHeader : kEntityHeader)
        << '\n';
    for (const auto& example : dataset.examples) {
        out << example.utterance << '\t' << example.parse << '\n';
    }
}

std::vector<std::string> load_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

void save_lines(const std::vector<std::string>& lines, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    for (const auto& line : lines) out << line << '\n';
}

}  // namespace taskparse
