/* Two-community color palettes; default red/blue plus a color-blind-safe
 * alternative (Okabe-Ito vermillion/blue). Cluster colors are categorical
 * and independent of community colors; noise is always gray.
 */

export interface Palette {
  community: [string, string];
  neutral: string;
  clusters: string[];
  noise: string;
}

export const DEFAULT_PALETTE: Palette = {
  community: ["#c0392b", "#2e5fa3"],
  neutral: "#555555",
  clusters: ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"],
  noise: "#9e9e9e",
};

export const COLORBLIND_SAFE_PALETTE: Palette = {
  community: ["#d55e00", "#0072b2"],
  neutral: "#555555",
  clusters: ["#009e73", "#e69f00", "#cc79a7", "#56b4e9", "#f0e442", "#000000"],
  noise: "#9e9e9e",
};

export function clusterColor(palette: Palette, label: number): string {
  if (label < 0) {
    return palette.noise;
  }
  return palette.clusters[label % palette.clusters.length];
}
