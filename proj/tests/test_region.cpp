#include <gtest/gtest.h>

#include "sporder/curve.hpp"
#include "sporder/random.hpp"
#include "sporder/region.hpp"

using namespace sporder;

TEST(Grid, LevelZeroIsTheWholeSquare)
{
    EXPECT_EQ(grid_cell_index(Complex(0.3, -1.2), 1.0, 0), 1u);
    EXPECT_EQ(grid_cell_index(Complex(-1.5, 1.5), 1.0, 0), 1u);
    EXPECT_FALSE(grid_cell_index(Complex(1.6, 0.0), 1.0, 0).has_value());
}

TEST(Grid, LevelOneIndexing)
{
    EXPECT_EQ(grid_cell_index(Complex(-1, 1), 1.0, 1), 1u);
    EXPECT_EQ(grid_cell_index(Complex(1, 1), 1.0, 1), 2u);
    EXPECT_EQ(grid_cell_index(Complex(-1, -1), 1.0, 1), 3u);
    EXPECT_EQ(grid_cell_index(Complex(1, -1), 1.0, 1), 4u);
}

TEST(Grid, SharedEdgesBelongToOneCell)
{
    // vertical edge x = 0 is the left edge of the right-hand cells
    EXPECT_EQ(grid_cell_index(Complex(0.0, 0.7), 1.0, 1), 2u);
    // horizontal edge y = 0 is the top edge of the lower cells
    EXPECT_EQ(grid_cell_index(Complex(-0.7, 0.0), 1.0, 1), 3u);
    // the center is the top-left corner of cell 4
    EXPECT_EQ(grid_cell_index(Complex(0.0, 0.0), 1.0, 1), 4u);
    // outer edges fold inward
    EXPECT_EQ(grid_cell_index(Complex(1.5, 0.7), 1.0, 1), 2u);
    EXPECT_EQ(grid_cell_index(Complex(-0.7, -1.5), 1.0, 1), 3u);
}

TEST(Grid, CellsPartitionTheLattice)
{
    const double radius = 2.0;
    for (int level = 1; level <= 3; ++level) {
        std::vector<Region> cells;
        const std::uint64_t count = std::uint64_t{1} << (2 * level);
        for (std::uint64_t k = 1; k <= count; ++k)
            cells.push_back(Region::cells(radius, level, {k}));
        // every lattice point of a finer grid, including all edges and corners
        const int m = 1 << (level + 1);
        for (int i = 0; i <= m; ++i)
            for (int j = 0; j <= m; ++j) {
                const Complex z(-3.0 + 6.0 * i / m, -3.0 + 6.0 * j / m);
                int hits = 0;
                std::uint64_t which = 0;
                for (std::uint64_t k = 0; k < count; ++k)
                    if (cells[k].contains(z)) {
                        ++hits;
                        which = k + 1;
                    }
                ASSERT_EQ(hits, 1) << level << " " << z;
                ASSERT_EQ(which, *grid_cell_index(z, radius, level));
            }
    }
}

TEST(RegionTest, Shapes)
{
    const Region d = Region::disk(Complex(1, 0), 0.5);
    EXPECT_TRUE(d.contains(Complex(1.5, 0)));
    EXPECT_FALSE(d.contains(Complex(1.5000001, 0)));
    const Region h = Region::halfplane(1.0, 1.0, 1.0);
    EXPECT_TRUE(h.contains(Complex(0.5, 0.5)));
    EXPECT_FALSE(h.contains(Complex(0.6, 0.5)));
    EXPECT_TRUE(Region::all().contains(Complex(100, 100)));
    EXPECT_FALSE(Region::none().contains(0.0));
    EXPECT_TRUE((d & h).contains(Complex(0.6, 0.0)));
    EXPECT_FALSE((d & h).contains(Complex(1.4, 0.0)));
    EXPECT_TRUE((d | h).contains(Complex(1.4, 0.0)));
    EXPECT_TRUE((!d).contains(0.0));
}

TEST(RegionTest, ParseAndDescribe)
{
    const Region r = Region::parse("!disk:0,0,1 & halfplane:1,0,2 | cells:n=1,k=1", 1.0);
    EXPECT_TRUE(r.contains(Complex(1.2, -1.2)));    // outside disk, x <= 2
    EXPECT_FALSE(r.contains(Complex(0.1, -0.1)));   // inside disk, not in cell 1
    EXPECT_TRUE(r.contains(Complex(-0.1, 0.1)));    // cell 1
    const Region again = Region::parse(r.describe(), 1.0);
    Rng rng(31);
    for (int i = 0; i < 1000; ++i) {
        const Complex z(3.0 * rng.uniform() - 1.5, 3.0 * rng.uniform() - 1.5);
        ASSERT_EQ(again.contains(z), r.contains(z));
    }
    EXPECT_TRUE(Region::parse("(disk:0,0,1)", 1.0).contains(0.5));
    EXPECT_THROW(Region::parse("disk:0,0", 1.0), std::invalid_argument);
    EXPECT_THROW(Region::parse("disk:0,0,-1", 1.0), std::invalid_argument);
    EXPECT_THROW(Region::parse("blob:1", 1.0), std::invalid_argument);
    EXPECT_THROW(Region::parse("disk:0,0,1 &", 1.0), std::invalid_argument);
    EXPECT_THROW(Region::parse("cells:n=1,k=5", 1.0), std::invalid_argument);
}

TEST(RegionTest, CurvePrefixFollowsMinimalPreimages)
{
    const OrderingCurve c(CurveKind::Hilbert, 1.0, 10);
    Rng rng(32);
    for (int i = 0; i < 200; ++i) {
        const Dyadic t = Dyadic::from_index(rng.bits() >> 44, 20);
        const Region closed = Region::curve_prefix(c, t, true), open = Region::curve_prefix(c, t, false);
        for (int j = 0; j < 20; ++j) {
            const Complex z(3.0 * rng.uniform() - 1.5, 3.0 * rng.uniform() - 1.5);
            ASSERT_EQ(closed.contains(z), c.min_preimage(z) <= t);
            ASSERT_EQ(open.contains(z), c.min_preimage(z) < t);
        }
        const Complex at = c.eval(t);
        EXPECT_TRUE(closed.contains(at));
        EXPECT_FALSE(open.contains(at));
    }
    EXPECT_FALSE(Region::curve_prefix(c, Dyadic::zero(), true).contains(Complex(5, 5)));
}

TEST(RegionTest, Rasterize)
{
    const Region r = Region::disk(Complex(-0.75, 0.75), 0.1);
    EXPECT_EQ(r.rasterize(1.0, 1), (std::vector<std::uint64_t>{1}));
    EXPECT_TRUE(Region::none().rasterize(1.0, 2).empty());
    EXPECT_EQ(Region::all().rasterize(1.0, 2).size(), 16u);
}

TEST(RegionTest, ClusterMembership)
{
    const Region d = Region::disk(0.0, 1.0);
    const std::vector<Complex> inside{0.5, 0.5 + 1e-9};
    EXPECT_TRUE(region_contains_cluster(d, 0.5, inside));
    const std::vector<Complex> straddle{1.0 - 1e-9, 1.0 + 1e-9};
    EXPECT_THROW(region_contains_cluster(d, 1.0, straddle), RegionAmbiguity);
}
