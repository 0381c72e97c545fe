#pragma once

#include <string>

#include "taskparse/dataset.hpp"
#include "taskparse/schema.hpp"

inline std::string repo_path(const std::string& rel) {
    return std::string(TASKPARSE_REPO_DIR) + "/" + rel;
}

inline taskparse::SchemaBundle load_repo_bundle(const std::string& name) {
    return taskparse::load_bundle(repo_path("bundles/" + name + ".json"));
}

inline taskparse::Dataset load_fixtures(const std::string& name) {
    return taskparse::load_dataset(repo_path("tests/data/fixtures_" + name + ".txt"));
}
