#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "rieszocp/sdp.h"

namespace rieszocp {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

// SDPA reads  sum_i x_i F_i - F_0 >= 0, so F_0 = -A_0 and F_i = A_i.
std::string format_sdpa(const StandardSDP& sdp) {
  sdp.validate();
  std::ostringstream os;
  os << sdp.nvar << "\n" << sdp.blocks.size() << "\n";
  for (std::size_t b = 0; b < sdp.blocks.size(); ++b) {
    const SdpBlock& blk = sdp.blocks[b];
    os << (b ? " " : "") << (blk.diagonal ? -blk.size : blk.size);
  }
  os << "\n";
  for (int i = 0; i < sdp.nvar; ++i) os << (i ? " " : "") << fmt(sdp.objective(i));
  os << "\n";

  // (matno, blkno, i, j) ordering: matrix-major as SDPA readers expect, and
  // block-major then row-major within each matrix.
  std::map<std::tuple<int, int, int, int>, double> entries;
  for (std::size_t b = 0; b < sdp.blocks.size(); ++b) {
    for (const BlockTerm& t : sdp.blocks[b].terms) {
      const int matno = t.var + 1;
      entries[{matno, static_cast<int>(b) + 1, t.row + 1, t.col + 1}] += matno == 0 ? -t.coef : t.coef;
    }
  }
  for (const auto& [key, v] : entries) {
    if (v == 0.0) continue;
    const auto [matno, blkno, i, j] = key;
    os << matno << " " << blkno << " " << i << " " << j << " " << fmt(v) << "\n";
  }
  return os.str();
}

void export_sdpa(const StandardSDP& sdp, const std::string& path) {
  const std::string text = format_sdpa(sdp);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace rieszocp
