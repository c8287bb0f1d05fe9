#pragma once

namespace besynth {

// Entry point behind the `besynth` binary. Exit codes: 0 success (including
// a verified strategy), 1 usage or I/O problem, 2 the domain fails the
// well-formedness rules (or its file is malformed), 3 the synthesized
// strategy fails verification, 4 a state or time budget was exceeded.
int cliMain(int argc, const char* const* argv);

} // namespace besynth
