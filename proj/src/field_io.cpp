#include "malab/errors.hpp"
#include "malab/field.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace malab {

void write_field(std::ostream& out, const ScalarField& field)
{
    const DiscGrid& g = field.grid();
    out << std::setprecision(17);
    if (g.kind() == GridKind::cartesian)
        out << "grid cartesian " << g.n1() << ' ' << g.n2() << ' ' << g.x1_lo() << ' '
            << g.x2_lo() << ' ' << g.h1() << ' ' << g.h2() << ' ' << g.radius() << '\n';
    else
        out << "grid polar " << g.n1() << ' ' << g.n2() << ' ' << g.r_min() << ' '
            << g.radius() << '\n';
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (field.defined(k))
            out << field[k] << '\n';
        else
            out << "nan\n";
    }
}

ScalarField read_field(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line))
        throw DomainError("field file is empty");
    std::istringstream hs(line);
    std::string tag, kind;
    hs >> tag >> kind;
    if (tag != "grid")
        throw DomainError("field header must start with 'grid'");

    auto grid = [&]() {
        if (kind == "cartesian") {
            int n1 = 0, n2 = 0;
            double lo1 = 0, lo2 = 0, h1 = 0, h2 = 0, radius = 0;
            if (!(hs >> n1 >> n2 >> lo1 >> lo2 >> h1 >> h2 >> radius))
                throw DomainError("malformed cartesian grid header");
            if (radius > 0.0)
                return DiscGrid::cartesian(n1 - 1, n2 - 1, radius);
            return DiscGrid::box(lo1, lo1 + h1 * (n1 - 1), n1, lo2, lo2 + h2 * (n2 - 1), n2);
        }
        if (kind == "polar") {
            int nr = 0, nt = 0;
            double rmin = 0, radius = 0;
            if (!(hs >> nr >> nt >> rmin >> radius))
                throw DomainError("malformed polar grid header");
            return DiscGrid::polar(nr, nt, rmin, radius);
        }
        throw DomainError("unknown grid kind '" + kind + "'");
    }();

    std::vector<double> values(grid.size());
    std::vector<NodeKind> mask = grid.masks();
    for (std::size_t k = 0; k < values.size(); ++k) {
        std::string tok;
        if (!(in >> tok))
            throw DomainError("field file truncated at value " + std::to_string(k));
        double v = std::strtod(tok.c_str(), nullptr);
        if (tok == "nan" || !std::isfinite(v)) {
            v = std::numeric_limits<double>::quiet_NaN();
            mask[k] = NodeKind::outside;
        }
        values[k] = v;
    }
    return ScalarField(grid.with_mask(std::move(mask)), std::move(values));
}

void save_field(const std::string& path, const ScalarField& field)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open " + path + " for writing");
    write_field(out, field);
}

ScalarField load_field(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path);
    return read_field(in);
}

void write_field_csv(std::ostream& out, const ScalarField& field)
{
    out << std::setprecision(17) << "x1,x2,u\n";
    for (std::size_t k = 0; k < field.grid().size(); ++k) {
        if (!field.defined(k))
            continue;
        const Vec2 x = field.grid().node(k);
        out << x.x() << ',' << x.y() << ',' << field[k] << '\n';
    }
}

}  // namespace malab
