/* Presentation-only formatting. Values arrive already rounded by the API
 * (rates 1 decimal, sentiment 2, shares 3); these helpers pin the same
 * precision for display and never transform the quantities themselves.
 */

export function formatRate(value: number): string {
  return value.toFixed(1);
}

export function formatSentiment(value: number | null): string {
  return value === null ? "—" : value.toFixed(2);
}

export function formatShare(value: number): string {
  return `${(value * 100).toFixed(1)}%`;
}

export function formatCount(value: number): string {
  return String(value);
}
