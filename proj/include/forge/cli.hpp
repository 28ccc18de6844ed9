#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace forge::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kFalse = 2,
  kInputError = 3,
  kExhausted = 4,
  kHypothesis = 5,
};

/// Runs one command line (without the program name). Never throws: every
/// error is reported on `err` and mapped to an exit code.
///
///   gen grid --g N | gen wall --h N [--subdivide K] | gen quadstar --leaves N
///   verify --host G --pattern H --map M [--roots F]     0 ok, 2 violation
///   find --host G --pattern H [--roots F] [--budget N]  0 found, 2 none, 4 exhausted
///   tw --graph G [--exact] [--limit N]
///   conn --graph G --set a,b,... --k K                  0 yes, 2 no
///   paths --graph G --from s --targets a,b,... --k K [--prescribe a,b,c]   0 found, 2 cut
///   wall find --graph G --h N [--budget N]              0 found, 2 none, 4 exhausted
///   wall dist --graph G --wall W --s i,j --t i,j
///   lift --graph G --at v --edges d1,d2
///   reduce --graph G --map M --s0 F --fins F [--out-wall W --out-fins F --out-graph G]
///   grid-immersion --graph G --g N --roots F [--wall W] [--set key=value]...
///                                                        0 found, 4 exhausted, 5 hypothesis
///   dot --graph G [--wall W] [--pattern H --map M]
/// Input errors give 3, internal errors 1. Outputs go to standard output
/// unless --out names a file.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace forge::cli
