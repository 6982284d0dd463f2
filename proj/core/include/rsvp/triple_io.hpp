#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsvp/triple.hpp"

namespace rsvp {

// Canonical JSON form. Key order is fixed so a rebuilt corpus is
// byte-identical; numbers that hold integral values are written as integers.
nlohmann::ordered_json triple_to_json(const Triple& t);
Triple triple_from_json(const nlohmann::json& j);

// One triple per line. Readers tolerate blank lines; errors carry the
// 1-based line number.
std::string triple_to_line(const Triple& t);
Triple triple_from_line(const std::string& line, size_t line_no = 0);

void write_triples(std::ostream& out, const std::vector<Triple>& triples);
std::vector<Triple> read_triples(std::istream& in, bool validate = true);

// Lenient reader: bad lines are skipped and reported through `warnings`
// instead of aborting the read.
std::vector<Triple> read_triples_lenient(std::istream& in,
                                         std::vector<std::string>* warnings,
                                         bool validate = true);

void write_triples_file(const std::string& path,
                        const std::vector<Triple>& triples);
std::vector<Triple> read_triples_file(const std::string& path,
                                      bool validate = true);

}  // namespace rsvp
