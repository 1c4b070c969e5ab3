#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "summands/modules.hpp"

namespace summands {

// Syntax or semantic error in a task file. what() is the bare message;
// render() adds the position and a caret under the offending column.
class TaskFileError : public Error {
 public:
  TaskFileError(ErrorCode code, size_t line, size_t column, std::string message, std::string source_line);
  size_t line() const { return line_; }
  size_t column() const { return column_; }
  std::string render(const std::string& filename = "input") const;

 private:
  size_t line_, column_;
  std::string source_line_;
};

struct TaskSpec {
  std::string verb;  // decompose, end0, frobenius, syzygy, certify, hilbert
  std::string target;
  std::string output;  // name of the result
  std::map<std::string, std::string> options;
  size_t line = 0;
};

struct ModuleBlock {
  std::string name;
  ModulePtr module;
  size_t line = 0;
};

// Text of a file:
//   field GF(3);
//   ring x,y,z degrees [1,1,1] ideal [x^3+y^3+z^3] mode graded;
//   module M gens [0,0] relations [[x, y], [y, z]];
//   task frobenius R e=1 output=F;
//   task decompose F;
// The ring block defines the free module R of rank one. Module degree
// matrices have one row per grading coordinate and one column per
// generator; an integer n stands for n generators of degree zero. Relation
// matrices have one row per generator.
struct TaskFile {
  FieldPtr field;
  std::string field_text;
  RingPtr ring;
  std::vector<ModuleBlock> modules;  // R first
  std::vector<TaskSpec> tasks;
};

struct ParseOptions {
  // Accept juxtaposition such as x^2y for x^2*y.
  bool implicit_mult = false;
};

TaskFile parse_taskfile(std::string_view text, const ParseOptions& options = {});

// Field description as accepted by the field block: QQ, QQ[i], QQ[t]/(g),
// GF(p), GF(q) with q a prime power, GF(p,e), GF(p^e).
FieldPtr parse_field(std::string_view text);

// Blocks that re-create a module: degree matrix and relation matrix in the
// syntax above.
std::string format_ring_block(const Ring& R);
std::string format_module_block(const std::string& name, const Presentation& M);

}  // namespace summands
