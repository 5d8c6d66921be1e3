#pragma once

// JavaScript executed inside the headless browser. Element handles live in a
// per-document registry (window.__mcEls) so a handle issued for one page can
// never resolve on the next one.

namespace mirrorcast::scripts {

// Installed before any page script runs; counts CSP violations per document.
inline constexpr const char* kNewDocument = R"JS(
(() => {
  Object.defineProperty(window, '__mcCsp', {value: 0, writable: true, enumerable: false});
  document.addEventListener('securitypolicyviolation', () => { window.__mcCsp++; }, true);
})();
)JS";

inline constexpr const char* kPageMetadata = R"JS(
const de = document.documentElement, b = document.body;
const height = Math.max(de ? de.scrollHeight : 0, b ? b.scrollHeight : 0, innerHeight);
const width = Math.max(de ? de.scrollWidth : 0, innerWidth);
const link = document.querySelector('link[rel~="icon" i]');
return {
  title: document.title,
  url: location.href,
  width: width,
  height: height,
  vw: innerWidth,
  vh: innerHeight,
  icon: link && link.href ? link.href : null,
  ready: document.readyState,
  csp: window.__mcCsp || 0
};
)JS";

inline constexpr const char* kReadyState = "return document.readyState;";

// Scrolls so that document point (x, y) is inside the viewport; returns the
// resulting scroll offset and viewport size.
inline constexpr const char* kRevealPoint = R"JS(
const x = arguments[0], y = arguments[1];
let sx = scrollX, sy = scrollY;
if (x < sx || x >= sx + innerWidth) sx = Math.max(0, x - innerWidth / 2);
if (y < sy || y >= sy + innerHeight) sy = Math.max(0, y - innerHeight / 2);
if (sx !== scrollX || sy !== scrollY) window.scrollTo(sx, sy);
return [scrollX, scrollY, innerWidth, innerHeight];
)JS";

inline constexpr const char* kScrollTo = "window.scrollTo(arguments[0], arguments[1]);";

inline constexpr const char* kSetElementText = R"JS(
const id = arguments[0], text = arguments[1];
const reg = window.__mcEls;
const el = reg ? reg[id] : undefined;
if (!el || !el.isConnected) return 'stale';
el.focus();
const proto = el instanceof HTMLTextAreaElement ? HTMLTextAreaElement.prototype : HTMLInputElement.prototype;
Object.getOwnPropertyDescriptor(proto, 'value').set.call(el, text);
el.dispatchEvent(new Event('input', {bubbles: true}));
el.dispatchEvent(new Event('change', {bubbles: true}));
return 'ok';
)JS";

// Visible interactive elements in document coordinates:
//   text/password/email/search/tel/url inputs, textarea  -> textbox
//   button, submit/button/image/reset inputs             -> button
//   a[href], anything with an inline onclick              -> link
inline constexpr const char* kExtractElements = R"JS(
if (!window.__mcEls) {
  Object.defineProperty(window, '__mcEls', {value: Object.create(null), enumerable: false});
  Object.defineProperty(window, '__mcEpoch', {value: Math.random().toString(36).slice(2, 10), enumerable: false});
  Object.defineProperty(window, '__mcNext', {value: 0, writable: true, enumerable: false});
}
const textTypes = new Set(['', 'text', 'password', 'email', 'search', 'tel', 'url']);
const buttonTypes = new Set(['submit', 'button', 'image', 'reset']);
const kindOf = (el) => {
  const tag = el.tagName;
  if (tag === 'TEXTAREA') return 'textbox';
  if (tag === 'INPUT') {
    const t = (el.getAttribute('type') || '').toLowerCase();
    if (textTypes.has(t)) return 'textbox';
    if (buttonTypes.has(t)) return 'button';
    return null;
  }
  if (tag === 'BUTTON') return 'button';
  if (tag === 'A' && el.hasAttribute('href')) return 'link';
  if (el.hasAttribute('onclick')) return 'link';
  return null;
};
const out = [];
for (const el of document.querySelectorAll('input,textarea,button,a[href],[onclick]')) {
  const kind = kindOf(el);
  if (!kind) continue;
  const style = getComputedStyle(el);
  if (style.display === 'none' || style.visibility === 'hidden' || style.visibility === 'collapse') continue;
  const r = el.getBoundingClientRect();
  if (r.width <= 0 || r.height <= 0) continue;
  if (!el.__mcId) {
    window.__mcNext += 1;
    Object.defineProperty(el, '__mcId', {value: window.__mcEpoch + '-' + window.__mcNext, enumerable: false});
  }
  window.__mcEls[el.__mcId] = el;
  let text;
  if (kind === 'textbox' || el.tagName === 'INPUT') text = el.value || '';
  else text = (el.innerText || el.textContent || '').trim();
  let href = '';
  if (kind === 'link' && el.tagName === 'A' && !el.hasAttribute('onclick') && /^https?:/i.test(el.href)) href = el.href;
  out.push({id: el.__mcId, kind: kind, x: r.left + scrollX, y: r.top + scrollY, w: r.width, h: r.height,
            text: text, href: href, focused: document.activeElement === el});
}
return out;
)JS";

}  // namespace mirrorcast::scripts
