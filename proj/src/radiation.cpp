#include "cse/radiation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "cse/coupling.hpp"
#include "cse/errors.hpp"
#include "cse/io.hpp"

namespace cse {

namespace {

std::size_t samples(double span, double spacing)
{
    return static_cast<std::size_t>(std::floor(2.0 * span / spacing + 0.5)) + 1;
}

}  // namespace

std::size_t ObservationGrid::nx() const { return samples(x_span, spacing); }
std::size_t ObservationGrid::ny() const { return samples(y_span, spacing); }

void ObservationGrid::validate() const
{
    if (!(spacing > 0.0))
        throw ConfigError("grid spacing must be positive");
    if (!(x_span > 0.0) || !(y_span > 0.0))
        throw ConfigError("grid spans must be positive");
    if (!(z_obs > 0.0))
        throw ConfigError("grid z_obs must be positive");
}

void ObservationGrid::validate(const CloudSpec& cloud) const
{
    validate();
    if (z_obs - cloud.Lz / 2.0 < kMinFarFieldGap)
        throw ConfigError("observation plane z_obs = " + format_number(z_obs) +
                          " must lie at least " + format_number(kMinFarFieldGap) +
                          " wavelengths beyond the cloud (Lz/2 = " + format_number(cloud.Lz / 2) +
                          ")");
}

CVec3 dipole_field(const Vec3& atom, std::complex<double> c_q, const Vec3& dipole_axis,
                   const Vec3& obs_point, double t)
{
    const Vec3 d = obs_point - atom;
    const double r = d.norm();
    if (!(r > 0.0))
        throw DomainError("dipole_field: observation point coincides with the source");
    const Vec3 r_hat = d / r;
    const Vec3 transverse = dipole_axis - dipole_axis.dot(r_hat) * r_hat;
    const double kr = kWaveNumber * r;
    const std::complex<double> w = std::polar(1.0 / kr, kr) * std::exp(-0.5 * t) * c_q;
    return transverse.cast<std::complex<double>>() * w;
}

FieldMap field_map(const AtomPositions& atoms, const Amplitudes& amplitudes,
                   const Vec3& dipole_axis, const ObservationGrid& grid)
{
    grid.validate();
    const std::size_t n = atoms.size();
    if (static_cast<std::size_t>(amplitudes.c.size()) != n)
        throw ConfigError("field_map: amplitude count does not match atom count");
    for (const Vec3& p : atoms.positions) {
        if (p.z() >= grid.z_obs)
            throw ConfigError("field_map: observation plane intersects the cloud");
    }

    const double envelope = std::exp(-0.5 * amplitudes.t);
    std::vector<std::complex<double>> weight(n);
    for (std::size_t q = 0; q < n; ++q)
        weight[q] = envelope * amplitudes.c[static_cast<Eigen::Index>(q)];

    FieldMap map{grid, amplitudes.t, {}};
    const std::size_t nx = grid.nx();
    const std::size_t ny = grid.ny();
    map.E.assign(nx * ny, CVec3::Zero());

    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            const Vec3 obs(grid.x(i), grid.y(j), grid.z_obs);
            // E = p * sum(w) - sum(w (p.r_hat) r_hat)
            std::complex<double> along_p = 0.0;
            CVec3 radial = CVec3::Zero();
            for (std::size_t q = 0; q < n; ++q) {
                const Vec3 d = obs - atoms[q];
                const double r = d.norm();
                const double kr = kWaveNumber * r;
                const std::complex<double> w =
                    weight[q] * std::complex<double>(std::cos(kr), std::sin(kr)) / kr;
                const Vec3 r_hat = d / r;
                along_p += w;
                radial += (w * dipole_axis.dot(r_hat)) * r_hat.cast<std::complex<double>>();
            }
            map.at(i, j) = dipole_axis.cast<std::complex<double>>() * along_p - radial;
        }
    }
    return map;
}

void write_field_csv(const FieldMap& map, const std::filesystem::path& path)
{
    CsvWriter csv(path, {"x", "y", "Re_Ex", "Im_Ex", "Re_Ey", "Im_Ey", "Re_Ez", "Im_Ez"});
    for (std::size_t j = 0; j < map.grid.ny(); ++j) {
        for (std::size_t i = 0; i < map.grid.nx(); ++i) {
            const CVec3& e = map.at(i, j);
            csv.row(map.grid.x(i), map.grid.y(j), e.x().real(), e.x().imag(), e.y().real(),
                    e.y().imag(), e.z().real(), e.z().imag());
        }
    }
}

FieldMap read_field_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    if (line.rfind("x,y,Re_Ex", 0) != 0)
        throw ConfigError(path.string() + ": not a field-map CSV");

    struct Sample {
        double x, y;
        CVec3 e;
    };
    std::vector<Sample> rows;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream ss(line);
        double v[8];
        char comma;
        for (int k = 0; k < 8; ++k) {
            if (k)
                ss >> comma;
            if (!(ss >> v[k]))
                throw ConfigError(path.string() + ": malformed row '" + line + "'");
        }
        rows.push_back({v[0], v[1], CVec3({v[2], v[3]}, {v[4], v[5]}, {v[6], v[7]})});
    }
    if (rows.size() < 4)
        throw ConfigError(path.string() + ": too few samples");

    std::vector<double> xs, ys;
    for (const auto& s : rows) {
        xs.push_back(s.x);
        ys.push_back(s.y);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    if (xs.size() < 2 || ys.size() < 2 || xs.size() * ys.size() != rows.size())
        throw ConfigError(path.string() + ": samples do not form a regular grid");

    FieldMap map;
    map.grid.spacing = xs[1] - xs[0];
    map.grid.x_span = -xs.front();
    map.grid.y_span = -ys.front();
    map.grid.z_obs = 0.0;
    if (map.grid.nx() != xs.size() || map.grid.ny() != ys.size())
        throw ConfigError(path.string() + ": grid is not centred on the axis");
    map.E.assign(rows.size(), CVec3::Zero());
    for (std::size_t k = 0; k < rows.size(); ++k)
        map.E[k] = rows[k].e;
    return map;
}

void write_graymap(const FieldMap& map, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    const std::size_t nx = map.grid.nx();
    const std::size_t ny = map.grid.ny();
    double peak = 0.0;
    for (const CVec3& e : map.E)
        peak = std::max(peak, e.norm());
    out << "P2\n" << nx << ' ' << ny << "\n255\n";
    for (std::size_t jj = 0; jj < ny; ++jj) {
        const std::size_t j = ny - 1 - jj;
        for (std::size_t i = 0; i < nx; ++i) {
            const double v = peak > 0.0 ? map.at(i, j).norm() / peak : 0.0;
            out << (i ? " " : "") << static_cast<int>(std::lround(255.0 * v));
        }
        out << '\n';
    }
}

}  // namespace cse
