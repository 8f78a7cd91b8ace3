#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ctree {

/// Base class for all data-level failures; the CLI maps these to exit code 2.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyFile : DataError {
    explicit EmptyFile(const std::string& path) : DataError("empty file: " + path) {}
};

struct IoError : DataError {
    explicit IoError(const std::string& path) : DataError("cannot open: " + path) {}
};

struct MalformedRecord : DataError {
    size_t line;
    MalformedRecord(const std::string& path, size_t line_no, const std::string& what)
        : DataError(path + ":" + std::to_string(line_no) + ": " + what), line(line_no) {}
};

struct DuplicateId : DataError {
    std::string id;
    explicit DuplicateId(const std::string& element_id)
        : DataError("duplicate element id: " + element_id), id(element_id) {}
};

struct MalformedGeometry : DataError {
    std::string id;
    explicit MalformedGeometry(const std::string& element_id, const std::string& what)
        : DataError("element " + element_id + ": " + what), id(element_id) {}
};

struct CycleDetected : DataError {
    explicit CycleDetected(const std::string& word)
        : DataError("taxonomy cycle involving: " + word) {}
};

struct MultipleRoots : DataError {
    MultipleRoots(const std::string& a, const std::string& b)
        : DataError("taxonomy has multiple roots: " + a + ", " + b) {}
};

struct UnknownParent : DataError {
    explicit UnknownParent(const std::string& word)
        : DataError("taxonomy node unreachable from root: " + word) {}
};

struct AllZero : DataError {
    AllZero() : DataError("window has no positively weighted element") {}
};

struct EmptyTagSet : DataError {
    EmptyTagSet() : DataError("tag similarity over an empty tag set") {}
};

struct EmptyTestDay : DataError {
    EmptyTestDay() : DataError("coverage test day has no elements") {}
};

}  // namespace ctree
