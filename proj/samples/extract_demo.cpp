// Builds a two-mode state by squeezing and mixing a thermal product, then
// recovers the Gaussian-extractable work and prints the protocol.

#include <cstdio>

#include "gpass/extraction.hpp"
#include "gpass/io.hpp"

int main(int argc, char** argv) {
  using namespace gpass;

  GaussianMomentState s;
  if (argc > 1) {
    s = state_from_json(read_json_file(argv[1]));
  } else {
    const ModeSystem modes({1.0, 2.0});
    s = {modes, Vector::Zero(4), Matrix(Eigen::Vector4d(1.5, 1.5, 3.0, 3.0).asDiagonal())};
    s = apply(compose({squeeze(0.4, 0, 2), two_mode_squeeze(0.3, 0, 1, 2), beam_splitter(0.7, 0, 1, 2)}), s);
    s.first_moments << 0.5, -1.0, 0.0, 0.25;
  }

  const ExtractionReport r = extract_work(s);
  std::printf("%s", trace_csv(r.steps).c_str());
  std::printf("initial energy  %.12f\n", r.initial_energy);
  std::printf("final energy    %.12f\n", r.final_energy);
  std::printf("extracted work  %.12f\n", r.extracted_work);
  std::printf("spectral bound  %.12f\n",
              minimal_gaussian_energy(symplectic_spectrum(r.final_state.covariance), r.final_state.modes));
  std::printf("passive         %s (clause %s)\n", r.passive_certificate.passive ? "yes" : "no",
              std::string(to_string(r.passive_certificate.clause)).c_str());
  return r.passive_certificate.passive ? 0 : 1;
}
