#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fusebench {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Command-line driver. `args` excludes the program name. Subcommands:
//   synth    --spec S --out-train A --out-test B [--seed-override N]
//   train    --scores TRAIN.csv --model M.json [--config C.json]
//   eval     --scores TEST.csv --model M.json [--config C.json]
//            [--strategies mdrr,vote,...] [--lambda L] [--report R.json]
//            [--roc-dir DIR]
//   weights  (--scores TRAIN.csv | --eers e1,e2,...)
// Returns kExitOk, kExitUsage for bad invocations and kExitData for
// unreadable or invalid inputs.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace fusebench
