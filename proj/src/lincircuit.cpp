#include "photonic/lincircuit.hpp"

#include <cmath>
#include <complex>
#include <set>
#include <stdexcept>

namespace photonic::lincircuit {

namespace {

void validate_element(const StageElement& el, std::size_t n_modes, std::set<std::size_t>& used) {
    auto claim = [&](std::size_t m) {
        if (m >= n_modes) throw std::invalid_argument("Netlist: mode index out of range");
        if (!used.insert(m).second) throw std::invalid_argument("Netlist: mode used twice within one stage");
    };
    if (const auto* c = std::get_if<CouplerSpec>(&el)) {
        if (!(c->cross_ratio >= 0.0 && c->cross_ratio <= 1.0))
            throw std::domain_error("CouplerSpec: cross ratio outside [0,1]");
        if (c->mode_a == c->mode_b) throw std::invalid_argument("CouplerSpec: coupler needs two distinct modes");
        claim(c->mode_a);
        claim(c->mode_b);
    } else {
        const auto& p = std::get<PhaseShiftSpec>(el);
        if (!std::isfinite(p.phase)) throw std::domain_error("PhaseShiftSpec: phase must be finite");
        claim(p.mode);
    }
}

}  // namespace

void Netlist::validate() const {
    if (!port_labels.empty() && port_labels.size() != n_modes)
        throw std::invalid_argument("Netlist: port_labels must be empty or have one entry per mode");
    for (const auto& stage : stages) {
        std::set<std::size_t> used;
        for (const auto& el : stage) validate_element(el, n_modes, used);
    }
}

std::size_t Netlist::mode_index(std::string_view label) const {
    for (std::size_t i = 0; i < port_labels.size(); ++i)
        if (port_labels[i] == label) return i;
    throw std::out_of_range("Netlist: unknown port label '" + std::string(label) + "'");
}

ComplexMatrix coupler_matrix(const CouplerSpec& spec) {
    if (!(spec.cross_ratio >= 0.0 && spec.cross_ratio <= 1.0))
        throw std::domain_error("coupler_matrix: cross ratio outside [0,1]");
    const double t = std::sqrt(1.0 - spec.cross_ratio);
    const double c = std::sqrt(spec.cross_ratio);
    ComplexMatrix m(2, 2);
    m(0, 0) = t;
    m(1, 1) = t;
    m(0, 1) = std::complex<double>(0.0, c);
    m(1, 0) = std::complex<double>(0.0, c);
    return m;
}

ComplexMatrix compile(const Netlist& netlist) {
    netlist.validate();
    ComplexMatrix total = ComplexMatrix::identity(netlist.n_modes);
    for (const auto& stage : netlist.stages) {
        ComplexMatrix m = ComplexMatrix::identity(netlist.n_modes);
        for (const auto& el : stage) {
            if (const auto* c = std::get_if<CouplerSpec>(&el)) {
                const ComplexMatrix b = coupler_matrix(*c);
                m(c->mode_a, c->mode_a) = b(0, 0);
                m(c->mode_a, c->mode_b) = b(0, 1);
                m(c->mode_b, c->mode_a) = b(1, 0);
                m(c->mode_b, c->mode_b) = b(1, 1);
            } else {
                const auto& p = std::get<PhaseShiftSpec>(el);
                m(p.mode, p.mode) = std::exp(std::complex<double>(0.0, p.phase));
            }
        }
        total = m * total;
    }
    if (total.unitarity_defect() > 1e-12)
        throw std::logic_error("compile: stage product lost unitarity");
    return total;
}

ComplexMatrix reduce_ports(const ComplexMatrix& S, const std::vector<std::size_t>& inputs,
                           const std::vector<std::size_t>& outputs) {
    std::set<std::size_t> seen_in(inputs.begin(), inputs.end());
    std::set<std::size_t> seen_out(outputs.begin(), outputs.end());
    if (seen_in.size() != inputs.size() || seen_out.size() != outputs.size())
        throw std::invalid_argument("reduce_ports: duplicate port index");
    for (std::size_t j : inputs)
        if (j >= S.cols()) throw std::out_of_range("reduce_ports: input index out of range");
    for (std::size_t i : outputs)
        if (i >= S.rows()) throw std::out_of_range("reduce_ports: output index out of range");

    ComplexMatrix out(outputs.size(), inputs.size());
    for (std::size_t a = 0; a < outputs.size(); ++a)
        for (std::size_t b = 0; b < inputs.size(); ++b) out(a, b) = S(outputs[a], inputs[b]);
    return out;
}

Netlist cnot_netlist(double c_half, double c_twothirds) {
    constexpr std::size_t anc_a = 0, c1 = 1, c0 = 2, t1 = 3, t0 = 4, anc_b = 5;
    Netlist n;
    n.n_modes = 6;
    n.port_labels = {"anc_a", "c1", "c0", "t1", "t0", "anc_b"};
    n.stages = {
        {CouplerSpec{c_half, t1, t0}},
        {CouplerSpec{c_twothirds, anc_a, c1}, CouplerSpec{c_twothirds, c0, t1},
         CouplerSpec{c_twothirds, t0, anc_b}},
        {CouplerSpec{c_half, t1, t0}},
    };
    return n;
}

std::vector<std::size_t> cnot_logical_modes() { return {1, 2, 3, 4}; }

nlohmann::json to_json(const Netlist& netlist) {
    nlohmann::json j;
    j["n_modes"] = netlist.n_modes;
    j["labels"] = netlist.port_labels;
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& stage : netlist.stages) {
        nlohmann::json s = nlohmann::json::array();
        for (const auto& el : stage) {
            if (const auto* c = std::get_if<CouplerSpec>(&el)) {
                s.push_back({{"type", "coupler"}, {"C", c->cross_ratio}, {"a", c->mode_a}, {"b", c->mode_b}});
            } else {
                const auto& p = std::get<PhaseShiftSpec>(el);
                s.push_back({{"type", "phase"}, {"mode", p.mode}, {"phi", p.phase}});
            }
        }
        stages.push_back(std::move(s));
    }
    j["stages"] = std::move(stages);
    return j;
}

Netlist netlist_from_json(const nlohmann::json& j) {
    Netlist n;
    n.n_modes = j.at("n_modes").get<std::size_t>();
    if (j.contains("labels")) n.port_labels = j.at("labels").get<std::vector<std::string>>();
    for (const auto& stage : j.at("stages")) {
        Stage s;
        for (const auto& el : stage) {
            const std::string type = el.at("type").get<std::string>();
            if (type == "coupler") {
                s.push_back(CouplerSpec{el.at("C").get<double>(), el.at("a").get<std::size_t>(),
                                        el.at("b").get<std::size_t>()});
            } else if (type == "phase") {
                s.push_back(PhaseShiftSpec{el.at("mode").get<std::size_t>(), el.at("phi").get<double>()});
            } else {
                throw std::invalid_argument("netlist_from_json: unknown stage element type '" + type + "'");
            }
        }
        n.stages.push_back(std::move(s));
    }
    n.validate();
    return n;
}

}  // namespace photonic::lincircuit
