#include "photonic/sweep.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "photonic/units.hpp"

namespace photonic::calib {

void SweepDataset::validate() const {
    if (samples.empty()) throw std::invalid_argument("sweep dataset is empty");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!std::isfinite(samples[i].wavelength_nm) || !std::isfinite(samples[i].value)) {
            throw std::domain_error("sweep samples must be finite");
        }
        if (i > 0 && samples[i].wavelength_nm <= samples[i - 1].wavelength_nm) {
            throw std::invalid_argument("sweep wavelengths must be strictly increasing");
        }
        if (scale == TransmissionScale::linear && samples[i].value < 0.0) {
            throw std::domain_error("linear transmissions must be non-negative");
        }
    }
}

SweepDataset SweepDataset::to_linear() const {
    if (scale == TransmissionScale::linear) return *this;
    SweepDataset out = *this;
    out.scale = TransmissionScale::linear;
    for (auto& s : out.samples) s.value = units::linear_from_db(s.value);
    return out;
}

SweepDataset SweepDataset::to_db() const {
    if (scale == TransmissionScale::dB) return *this;
    SweepDataset out = *this;
    out.scale = TransmissionScale::dB;
    for (auto& s : out.samples) {
        if (s.value <= 0.0) throw std::domain_error("cannot convert non-positive transmission to dB");
        s.value = units::db_from_linear(s.value);
    }
    return out;
}

double SweepDataset::min_wavelength() const {
    if (samples.empty()) throw std::invalid_argument("sweep dataset is empty");
    return samples.front().wavelength_nm;
}

double SweepDataset::max_wavelength() const {
    if (samples.empty()) throw std::invalid_argument("sweep dataset is empty");
    return samples.back().wavelength_nm;
}

SweepDataset load_sweep_csv(const std::filesystem::path& csv_path, std::string device_id,
                            std::string port_id, TransmissionScale scale) {
    std::ifstream in(csv_path);
    if (!in) throw std::runtime_error("cannot open sweep file: " + csv_path.string());
    SweepDataset out;
    out.device_id = std::move(device_id);
    out.port_id = std::move(port_id);
    out.scale = scale;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            if (line != "wavelength_nm,value") {
                throw std::runtime_error("unexpected sweep header in " + csv_path.string() + ": " + line);
            }
            header_seen = true;
            continue;
        }
        std::stringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b)) {
            throw std::runtime_error("malformed sweep row in " + csv_path.string() + ": " + line);
        }
        out.samples.push_back(SweepSample{std::stod(a), std::stod(b)});
    }
    if (!header_seen) throw std::runtime_error("sweep file has no header: " + csv_path.string());
    out.validate();
    return out;
}

void save_sweep_csv(const SweepDataset& data, const std::filesystem::path& csv_path) {
    data.validate();
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot write sweep file: " + csv_path.string());
    out.precision(12);
    out << "wavelength_nm,value\n";
    for (const auto& s : data.samples) out << s.wavelength_nm << ',' << s.value << "\n";
}

SweepDataset boxcar_average(const SweepDataset& data, double window_nm) {
    data.validate();
    if (!(window_nm > 0.0)) throw std::domain_error("averaging window must be positive");
    SweepDataset out = data;
    const double half = 0.5 * window_nm;
    std::size_t lo = 0;
    std::size_t hi = 0;
    for (std::size_t i = 0; i < data.samples.size(); ++i) {
        const double center = data.samples[i].wavelength_nm;
        while (data.samples[lo].wavelength_nm < center - half) ++lo;
        if (hi < i) hi = i;
        while (hi + 1 < data.samples.size() && data.samples[hi + 1].wavelength_nm <= center + half) ++hi;
        double sum = 0.0;
        for (std::size_t k = lo; k <= hi; ++k) sum += data.samples[k].value;
        out.samples[i].value = sum / static_cast<double>(hi - lo + 1);
    }
    return out;
}

}  // namespace photonic::calib
