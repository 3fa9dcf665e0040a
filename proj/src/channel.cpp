// SPDX-License-Identifier: MIT
#include "oamnfc/channel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace oamnfc {
namespace {

[[noreturn]] void fail(const std::string& origin, long line,
                       const std::string& what) {
  std::ostringstream msg;
  msg << origin << ":" << line << ": " << what;
  throw std::runtime_error(msg.str());
}

}  // namespace

ChannelMatrix assemble_channel(const MutualInductanceMatrix& mi,
                               const CoilElectrical& elec,
                               bool include_crosstalk) {
  const Eigen::Index n_rx = mi.tx_rx.rows();
  const Eigen::Index n_tx = mi.tx_rx.cols();
  if (n_rx < 1 || n_tx < 1)
    throw std::invalid_argument("assemble_channel: empty coupling matrix");
  if (mi.tx_tx.rows() != n_tx || mi.tx_tx.cols() != n_tx)
    throw std::invalid_argument(
        "assemble_channel: crosstalk matrix dimension mismatch");
  if (std::abs(elec.impedance) <= 0.0)
    throw std::invalid_argument("assemble_channel: zero coil impedance");

  const std::complex<double> z = elec.impedance;
  const double w = elec.omega;
  const std::complex<double> first_scale = std::complex<double>(0.0, -w) / z;
  const std::complex<double> second_scale = -(w * w) / (z * z);

  ChannelMatrix ch;
  ch.h = first_scale * mi.tx_rx;
  if (include_crosstalk) ch.h += second_scale * (mi.tx_rx * mi.tx_tx);
  ch.source = ChannelSource::analytic;
  ch.frequency = elec.frequency;
  ch.geometry = mi.geometry;
  return ch;
}

ReducedChannel reduce_channel(const ChannelMatrix& ch) {
  const Eigen::Index n_rx = ch.h.rows();
  const Eigen::Index n_tx = ch.h.cols();
  if (n_tx < 1 || n_rx < 1)
    throw std::invalid_argument("reduce_channel: empty channel");
  if (n_rx % n_tx != 0)
    throw std::invalid_argument(
        "reduce_channel: receive count must be an integer multiple of the "
        "transmit count (use the estimation path otherwise)");
  const Eigen::Index fold = n_rx / n_tx;
  ReducedChannel rc;
  rc.fold = static_cast<int>(fold);
  rc.h_hat.resize(n_tx, n_tx);
  for (Eigen::Index g = 0; g < n_tx; ++g)
    rc.h_hat.row(g) =
        ch.h.middleRows(g * fold, fold).colwise().mean();
  return rc;
}

double circulant_residual(const ReducedChannel& rc) {
  const Eigen::Index n = rc.h_hat.rows();
  if (n != rc.h_hat.cols())
    throw std::invalid_argument("circulant_residual: matrix must be square");
  const double scale = rc.h_hat.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) return 0.0;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      worst = std::max(worst, std::abs(rc.h_hat(i, j) -
                                       rc.h_hat((i + 1) % n, (j + 1) % n)));
  return worst / scale;
}

SParameterDocument read_s_parameters(std::istream& in,
                                     const std::string& origin) {
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) fail(origin, 1, "empty document");
  ++line_no;

  SParameterDocument doc;
  {
    // Header: "# sparam v1, f_hz=<f>, n_tx=<nt>, n_rx=<nr>"
    std::istringstream hs(line);
    std::string hash, tag, ver;
    hs >> hash >> tag >> ver;
    if (hash != "#" || tag != "sparam" || ver != "v1,")
      fail(origin, line_no,
           "bad header; expected '# sparam v1, f_hz=<f>, n_tx=<n>, n_rx=<n>'");
    double f = -1.0;
    int nt = -1, nr = -1;
    std::string field;
    while (std::getline(hs, field, ',')) {
      std::istringstream fs(field);
      std::string key;
      std::getline(fs, key, '=');
      key.erase(0, key.find_first_not_of(" \t"));
      key.erase(key.find_last_not_of(" \t") + 1);
      std::string value;
      std::getline(fs, value);
      try {
        if (key == "f_hz") f = std::stod(value);
        else if (key == "n_tx") nt = std::stoi(value);
        else if (key == "n_rx") nr = std::stoi(value);
        else fail(origin, line_no, "unknown header field '" + key + "'");
      } catch (const std::invalid_argument&) {
        fail(origin, line_no, "unparsable header value for '" + key + "'");
      }
    }
    if (!(f > 0.0)) fail(origin, line_no, "missing or non-positive f_hz");
    if (nt < 1 || nr < 1) fail(origin, line_no, "missing or invalid n_tx/n_rx");
    doc.f_hz = f;
    doc.n_tx = nt;
    doc.n_rx = nr;
  }

  const int ports = doc.n_tx + doc.n_rx;
  doc.s = Eigen::MatrixXcd::Zero(ports, ports);
  std::vector<char> seen(static_cast<size_t>(ports) * ports, 0);

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    long r = 0, c = 0;
    double re = 0.0, im = 0.0;
    try {
      if (!std::getline(ls, cell, ',')) throw std::invalid_argument("row");
      r = std::stol(cell);
      if (!std::getline(ls, cell, ',')) throw std::invalid_argument("col");
      c = std::stol(cell);
      if (!std::getline(ls, cell, ',')) throw std::invalid_argument("re");
      re = std::stod(cell);
      if (!std::getline(ls, cell, ',')) throw std::invalid_argument("im");
      im = std::stod(cell);
    } catch (const std::invalid_argument&) {
      fail(origin, line_no, "malformed entry line '" + line + "'");
    }
    if (std::getline(ls, cell, ','))
      fail(origin, line_no, "trailing fields on entry line");
    if (r < 1 || r > ports || c < 1 || c > ports)
      fail(origin, line_no, "port index out of range on entry line");
    if (!std::isfinite(re) || !std::isfinite(im))
      fail(origin, line_no, "non-finite entry");
    char& mark = seen[static_cast<size_t>(r - 1) * ports + (c - 1)];
    if (mark) fail(origin, line_no, "duplicate entry for (row, col)");
    mark = 1;
    doc.s(r - 1, c - 1) = std::complex<double>(re, im);
  }

  for (int r = 0; r < ports; ++r)
    for (int c = 0; c < ports; ++c)
      if (!seen[static_cast<size_t>(r) * ports + c]) {
        std::ostringstream msg;
        msg << origin << ": missing entry (" << r + 1 << ", " << c + 1 << ")";
        throw std::runtime_error(msg.str());
      }
  return doc;
}

SParameterDocument read_s_parameters_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open S-parameter file: " + path);
  return read_s_parameters(in, path);
}

void write_s_parameters(const SParameterDocument& doc, std::ostream& out) {
  const int ports = doc.n_tx + doc.n_rx;
  if (doc.s.rows() != ports || doc.s.cols() != ports)
    throw std::invalid_argument(
        "write_s_parameters: matrix does not match declared port counts");
  char buf[128];
  std::snprintf(buf, sizeof buf, "# sparam v1, f_hz=%.17g, n_tx=%d, n_rx=%d\n",
                doc.f_hz, doc.n_tx, doc.n_rx);
  out << buf;
  for (int r = 0; r < ports; ++r)
    for (int c = 0; c < ports; ++c) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", r + 1, c + 1,
                    doc.s(r, c).real(), doc.s(r, c).imag());
      out << buf;
    }
}

void write_s_parameters_file(const SParameterDocument& doc,
                             const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  write_s_parameters(doc, out);
}

ChannelMatrix import_s_parameters(const SParameterDocument& doc) {
  const int ports = doc.n_tx + doc.n_rx;
  if (doc.n_tx < 1 || doc.n_rx < 1 || doc.s.rows() != ports ||
      doc.s.cols() != ports)
    throw std::invalid_argument("import_s_parameters: inconsistent document");
  if (!doc.s.allFinite())
    throw std::invalid_argument("import_s_parameters: non-finite entries");
  ChannelMatrix ch;
  ch.h = doc.s.block(doc.n_tx, 0, doc.n_rx, doc.n_tx);
  ch.source = ChannelSource::imported;
  ch.frequency = doc.f_hz;
  return ch;
}

}  // namespace oamnfc
