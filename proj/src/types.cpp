#include "lkgomea/types.hpp"

namespace lkgomea
{

Genotype Genotype::from_string(std::string_view text)
{
    Genotype g(text.size());
    for (std::size_t i = 0; i < text.size(); ++i)
    {
        if (text[i] == '0')
            g.bits_[i] = 0;
        else if (text[i] == '1')
            g.bits_[i] = 1;
        else
            throw std::invalid_argument("genotype string may only contain '0' and '1'");
    }
    return g;
}

Genotype Genotype::random(std::size_t length, Rng &rng)
{
    Genotype g(length);
    for (auto &b : g.bits_)
        b = rng.bit() ? 1 : 0;
    return g;
}

std::string Genotype::to_string() const
{
    std::string s(bits_.size(), '0');
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (bits_[i])
            s[i] = '1';
    return s;
}

Genotype Genotype::complement() const
{
    Genotype g(*this);
    for (auto &b : g.bits_)
        b ^= 1;
    return g;
}

bool weakly_dominates(const Fitness &a, const Fitness &b)
{
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] < b[i])
            return false;
    return true;
}

bool dominates(const Fitness &a, const Fitness &b)
{
    bool strict = false;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        if (a[i] < b[i])
            return false;
        if (a[i] > b[i])
            strict = true;
    }
    return strict;
}

} // namespace lkgomea
